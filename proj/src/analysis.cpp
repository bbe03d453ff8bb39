#include "respdisp/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "respdisp/errors.hpp"

namespace respdisp {

namespace {

void check_tolerance(double tolerance) {
  if (!(tolerance >= 0.0 && tolerance <= 1.0)) throw DomainError("tolerance must lie in [0, 1]");
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// category -> model -> accuracy; rejects duplicate entries.
std::map<std::string, std::map<std::string, double>> accuracy_table(std::span<const CategoryAccuracy> accuracies) {
  std::map<std::string, std::map<std::string, double>> table;
  for (const auto& a : accuracies) {
    if (!table[a.category].emplace(a.model_id, a.accuracy).second) {
      throw DomainError("duplicate accuracy for " + a.model_id + " / " + a.category);
    }
  }
  return table;
}

double parse_number(std::string_view token) {
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw DomainError("invalid number in tolerance grid: \"" + std::string(token) + "\"");
  }
  return value;
}

}  // namespace

bool tolerance_success(double acc_chosen, double acc_other, double tolerance) {
  return acc_chosen + tolerance >= acc_other - kAccuracyEpsilon;
}

PairOutcome compare_pair(const DispersionResult& a, const DispersionResult& b, double acc_a, double acc_b,
                         double tolerance) {
  if (a.category != b.category) {
    throw DomainError("compare_pair: category mismatch (" + a.category + " vs " + b.category + ")");
  }
  if (a.embedding_kind != b.embedding_kind) throw DomainError("compare_pair: embedding kind mismatch");
  check_tolerance(tolerance);

  PairOutcome out;
  out.category = a.category;
  out.model_a = a.model_id;
  out.model_b = b.model_id;
  out.tolerance = tolerance;
  if (a.count == b.count) {
    out.tie = true;
    out.chosen = std::min(a.model_id, b.model_id);
    out.success = tolerance_success(acc_a, acc_b, tolerance) && tolerance_success(acc_b, acc_a, tolerance);
  } else if (a.count < b.count) {
    out.chosen = a.model_id;
    out.success = tolerance_success(acc_a, acc_b, tolerance);
  } else {
    out.chosen = b.model_id;
    out.success = tolerance_success(acc_b, acc_a, tolerance);
  }
  return out;
}

std::vector<CategorySuccess> use_case_success(std::span<const DispersionResult> dispersions,
                                              std::span<const CategoryAccuracy> accuracies, double tolerance) {
  check_tolerance(tolerance);
  const auto acc = accuracy_table(accuracies);

  std::map<std::string, std::map<std::string, const DispersionResult*>> disp;
  for (const auto& d : dispersions) {
    if (d.embedding_kind != dispersions.front().embedding_kind) {
      throw DomainError("use_case_success: dispersions mix embedding kinds");
    }
    if (!disp[d.category].emplace(d.model_id, &d).second) {
      throw DomainError("duplicate dispersion for " + d.model_id + " / " + d.category);
    }
  }

  std::vector<CategorySuccess> out;
  for (const auto& [category, by_model] : disp) {
    const auto acc_it = acc.find(category);
    std::vector<std::pair<const DispersionResult*, double>> models;
    for (const auto& [model, result] : by_model) {
      if (acc_it == acc.end()) break;
      if (const auto a = acc_it->second.find(model); a != acc_it->second.end()) models.emplace_back(result, a->second);
    }
    if (models.size() < 2) {
      spdlog::warn("category {}: fewer than 2 models with both dispersion and accuracy; skipped", category);
      continue;
    }
    CategorySuccess cs;
    cs.category = category;
    for (std::size_t i = 0; i < models.size(); ++i) {
      for (std::size_t j = i + 1; j < models.size(); ++j) {
        ++cs.pairs;
        if (compare_pair(*models[i].first, *models[j].first, models[i].second, models[j].second, tolerance).success) {
          cs.successes += 1.0;
        }
      }
    }
    cs.fraction = cs.successes / static_cast<double>(cs.pairs);
    out.push_back(std::move(cs));
  }
  return out;
}

std::vector<CategorySuccess> monte_carlo_baseline(std::span<const CategoryAccuracy> accuracies, double tolerance,
                                                  std::size_t iterations, std::uint64_t rng_seed) {
  check_tolerance(tolerance);
  if (iterations == 0) throw DomainError("monte_carlo_baseline: iterations must be positive");
  const auto acc = accuracy_table(accuracies);

  std::vector<CategorySuccess> out;
  for (const auto& [category, by_model] : acc) {
    if (by_model.size() < 2) {
      spdlog::warn("category {}: fewer than 2 models with accuracy; baseline skipped", category);
      continue;
    }
    std::vector<double> values;
    for (const auto& [model, a] : by_model) values.push_back(a);

    const std::uint64_t h = fnv1a(category);
    std::seed_seq seq{static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    std::mt19937_64 rng(seq);

    std::uint64_t wins = 0;
    std::uint64_t trials = 0;
    for (std::size_t it = 0; it < iterations; ++it) {
      for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = i + 1; j < values.size(); ++j) {
          const bool pick_first = (rng() >> 63) != 0;
          const double chosen = pick_first ? values[i] : values[j];
          const double other = pick_first ? values[j] : values[i];
          if (tolerance_success(chosen, other, tolerance)) ++wins;
          ++trials;
        }
      }
    }
    CategorySuccess cs;
    cs.category = category;
    cs.pairs = values.size() * (values.size() - 1) / 2;
    cs.successes = static_cast<double>(wins) / static_cast<double>(iterations);
    cs.fraction = static_cast<double>(wins) / static_cast<double>(trials);
    out.push_back(std::move(cs));
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("spearman: length mismatch");
  if (xs.size() < 2) throw DomainError("spearman: need at least 2 values");
  for (double v : xs) {
    if (!std::isfinite(v)) throw DomainError("spearman: non-finite value");
  }
  for (double v : ys) {
    if (!std::isfinite(v)) throw DomainError("spearman: non-finite value");
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mean = (n + 1.0) / 2.0;  // ranks always average to (n+1)/2
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("spearman: correlation undefined for a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<RankedModel> rank_models(std::span<const std::pair<std::string, double>> metric, RankDirection direction) {
  std::vector<RankedModel> out;
  out.reserve(metric.size());
  for (const auto& [model, value] : metric) out.push_back({model, value, 0.0});
  std::stable_sort(out.begin(), out.end(), [direction](const RankedModel& a, const RankedModel& b) {
    return direction == RankDirection::lower_better ? a.value < b.value : a.value > b.value;
  });
  for (std::size_t i = 0; i < out.size();) {
    std::size_t j = i;
    while (j + 1 < out.size() && out[j + 1].value == out[i].value) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) out[k].rank = rank;
    i = j + 1;
  }
  return out;
}

std::vector<double> default_tolerance_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  return grid;
}

std::vector<double> parse_tolerance_grid(std::string_view text) {
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw DomainError("tolerance range must be start:stop:step");
    const double start = parse_number(text.substr(0, c1));
    const double stop = parse_number(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_number(text.substr(c2 + 1));
    if (!(step > 0.0)) throw DomainError("tolerance step must be positive");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
      // Round to 12 decimals so 0:1:0.05 yields 0.05, not 0.05000000000000001.
      grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const auto token = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      grid.push_back(parse_number(token));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  }
  if (grid.empty()) throw DomainError("tolerance grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_tolerance(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("tolerance grid must be strictly ascending");
  }
  return grid;
}

UseCaseReport tolerance_curve(std::span<const DispersionResult> dispersions,
                              std::span<const CategoryAccuracy> accuracies, std::span<const double> grid,
                              std::uint64_t rng_seed, std::size_t iterations) {
  if (grid.empty()) throw DomainError("tolerance_curve: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_tolerance(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("tolerance_curve: grid must be strictly ascending");
  }

  UseCaseReport report;
  report.grid.assign(grid.begin(), grid.end());
  report.rng_seed = rng_seed;
  report.iterations = iterations;

  auto mean_of = [](const std::vector<CategorySuccess>& cats) {
    if (cats.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& c : cats) sum += c.fraction;
    return sum / static_cast<double>(cats.size());
  };

  std::map<EmbeddingKind, std::vector<DispersionResult>> by_kind;
  for (const auto& d : dispersions) by_kind[d.embedding_kind].push_back(d);

  for (const auto& [kind, rows] : by_kind) {
    auto& curve = report.dispersion[kind];
    for (double t : grid) {
      CurvePoint p;
      p.tolerance = t;
      p.categories = use_case_success(rows, accuracies, t);
      p.mean = mean_of(p.categories);
      curve.push_back(std::move(p));
    }
  }
  for (double t : grid) {
    CurvePoint p;
    p.tolerance = t;
    p.categories = monte_carlo_baseline(accuracies, t, iterations, rng_seed);
    p.mean = mean_of(p.categories);
    report.baseline.push_back(std::move(p));
  }
  return report;
}

std::string curve_csv(const UseCaseReport& report) {
  std::string out = "tolerance,rss_success,remote_success,baseline\n";
  const auto* rss = report.dispersion.contains(EmbeddingKind::rss) ? &report.dispersion.at(EmbeddingKind::rss) : nullptr;
  const auto* remote =
      report.dispersion.contains(EmbeddingKind::remote) ? &report.dispersion.at(EmbeddingKind::remote) : nullptr;
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    out += fmt::format("{}", report.grid[i]);
    out += rss ? fmt::format(",{:.6f}", (*rss)[i].mean) : std::string(",");
    out += remote ? fmt::format(",{:.6f}", (*remote)[i].mean) : std::string(",");
    out += fmt::format(",{:.6f}\n", report.baseline[i].mean);
  }
  return out;
}

}  // namespace respdisp
