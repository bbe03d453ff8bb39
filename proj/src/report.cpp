#include "respdisp/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "respdisp/errors.hpp"

namespace respdisp {

namespace {

std::string percent(double fraction) { return fmt::format("{:.1f}%", 100.0 * fraction); }

template <typename T>
std::string cell(const std::optional<T>& v, const char* format) {
  return v ? fmt::format(fmt::runtime(format), *v) : std::string("n/a");
}

// Spearman over rows where both metrics exist; nullopt when undefined.
template <typename GetX, typename GetY>
std::optional<double> correlation(const std::vector<CategoryTable::Row>& rows, GetX get_x, GetY get_y) {
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    const auto x = get_x(r);
    const auto y = get_y(r);
    if (x && y) {
      xs.push_back(static_cast<double>(*x));
      ys.push_back(static_cast<double>(*y));
    }
  }
  try {
    return spearman(xs, ys);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

void assign_ranks(std::vector<CategoryTable::Row>& rows, auto get, auto set, RankDirection direction) {
  std::vector<std::pair<std::string, double>> metric;
  for (const auto& r : rows) {
    if (const auto v = get(r)) metric.emplace_back(r.model_id, static_cast<double>(*v));
  }
  for (const auto& ranked : rank_models(metric, direction)) {
    for (auto& r : rows) {
      if (r.model_id == ranked.model_id) set(r, ranked.rank);
    }
  }
}

struct MeanCorrelation {
  double sum = 0.0;
  std::size_t n = 0;
  void add(const std::optional<double>& v) {
    if (v) sum += *v, ++n;
  }
  std::string text() const { return n ? fmt::format("{:+.3f} (mean over {} categories)", sum / n, n) : "n/a"; }
};

}  // namespace

std::vector<CategoryTable> category_tables(std::span<const DispersionResult> dispersions,
                                           std::span<const CategoryAccuracy> accuracies) {
  std::map<std::string, std::map<std::string, CategoryTable::Row>> rows;
  auto row = [&](const std::string& category, const std::string& model) -> CategoryTable::Row& {
    auto& r = rows[category][model];
    r.model_id = model;
    return r;
  };
  for (const auto& a : accuracies) row(a.category, a.model_id).accuracy = a.accuracy;
  for (const auto& d : dispersions) {
    auto& r = row(d.category, d.model_id);
    (d.embedding_kind == EmbeddingKind::rss ? r.rss : r.remote) = d.count;
  }

  std::vector<CategoryTable> tables;
  for (auto& [category, by_model] : rows) {
    CategoryTable t;
    t.category = category;
    for (auto& [model, r] : by_model) t.rows.push_back(std::move(r));

    assign_ranks(t.rows, [](const auto& r) { return r.accuracy; }, [](auto& r, double k) { r.accuracy_rank = k; },
                 RankDirection::higher_better);
    assign_ranks(t.rows, [](const auto& r) { return r.rss; }, [](auto& r, double k) { r.rss_rank = k; },
                 RankDirection::lower_better);
    assign_ranks(t.rows, [](const auto& r) { return r.remote; }, [](auto& r, double k) { r.remote_rank = k; },
                 RankDirection::lower_better);
    std::stable_sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
      const double ra = a.accuracy_rank.value_or(1e300);
      const double rb = b.accuracy_rank.value_or(1e300);
      return ra != rb ? ra < rb : a.model_id < b.model_id;
    });

    t.acc_vs_rss = correlation(t.rows, [](const auto& r) { return r.accuracy; }, [](const auto& r) { return r.rss; });
    t.acc_vs_remote =
        correlation(t.rows, [](const auto& r) { return r.accuracy; }, [](const auto& r) { return r.remote; });
    t.rss_vs_remote = correlation(t.rows, [](const auto& r) { return r.rss; }, [](const auto& r) { return r.remote; });
    tables.push_back(std::move(t));
  }
  return tables;
}

std::vector<std::size_t> highlighted_columns(std::span<const double> grid) {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (double h : {0.0, 0.05, 0.10}) {
      if (std::abs(grid[i] - h) < 1e-9) cols.push_back(i);
    }
  }
  if (cols.empty()) {
    for (std::size_t i = 0; i < grid.size(); ++i) cols.push_back(i);
  }
  return cols;
}

std::string render_summary_markdown(const UseCaseReport& report, std::span<const CategoryTable> tables,
                                    const std::string& remote_model_name) {
  const auto cols = highlighted_columns(report.grid);
  std::string out = "# Success % averaged over all categories\n\n";
  out += "| Response dispersion by embedding |";
  for (auto c : cols) out += fmt::format(" {:g}% tolerance |", 100.0 * report.grid[c]);
  out += "\n|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) out += "---:|";
  out += "\n";

  auto series_row = [&](const std::string& label, const std::vector<CurvePoint>& curve) {
    out += "| " + label + " |";
    for (auto c : cols) out += " " + percent(curve[c].mean) + " |";
    out += "\n";
  };
  if (report.dispersion.contains(EmbeddingKind::rss)) {
    series_row("Reference sentence similarities (RSS)", report.dispersion.at(EmbeddingKind::rss));
  }
  if (report.dispersion.contains(EmbeddingKind::remote)) {
    series_row("Remote embeddings (" + remote_model_name + ")", report.dispersion.at(EmbeddingKind::remote));
  }
  series_row("Random choice baseline", report.baseline);

  std::set<std::string> categories;
  for (const auto& [kind, curve] : report.dispersion) {
    for (const auto& c : curve.front().categories) categories.insert(c.category);
  }
  out += fmt::format("\nCategories evaluated: {}.\n", categories.size());
  out += fmt::format("Baseline: {} Monte Carlo iterations, generator {}, seed {}.\n", report.iterations,
                     report.rng_algorithm, report.rng_seed);

  MeanCorrelation rss, remote, cross;
  for (const auto& t : tables) {
    rss.add(t.acc_vs_rss);
    remote.add(t.acc_vs_remote);
    cross.add(t.rss_vs_remote);
  }
  out += "\n## Spearman rank correlation\n\n";
  out += "| Pair | Value |\n|---|---:|\n";
  out += "| accuracy vs RSS dispersion | " + rss.text() + " |\n";
  out += "| accuracy vs remote dispersion | " + remote.text() + " |\n";
  out += "| RSS vs remote dispersion | " + cross.text() + " |\n";
  return out;
}

std::string render_category_markdown(std::span<const CategoryTable> tables, const ShortNameFn& short_name) {
  std::string out = "# Models ranked in each category\n";
  for (const auto& t : tables) {
    out += "\n## " + t.category + "\n\n";
    out += "| Model | Accuracy | Accuracy rank | RSS dispersion | RSS rank | Remote dispersion | Remote rank |\n";
    out += "|---|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& r : t.rows) {
      out += fmt::format("| {} | {} | {} | {} | {} | {} | {} |\n", short_name(r.model_id),
                         r.accuracy ? percent(*r.accuracy) : std::string("n/a"), cell(r.accuracy_rank, "{:g}"),
                         cell(r.rss, "{}"), cell(r.rss_rank, "{:g}"), cell(r.remote, "{}"),
                         cell(r.remote_rank, "{:g}"));
    }
    out += fmt::format("\nSpearman: accuracy vs RSS {}; accuracy vs remote {}; RSS vs remote {}.\n",
                       cell(t.acc_vs_rss, "{:+.3f}"), cell(t.acc_vs_remote, "{:+.3f}"),
                       cell(t.rss_vs_remote, "{:+.3f}"));
  }
  return out;
}

}  // namespace respdisp
