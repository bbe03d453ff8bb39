// Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "demo_project.hpp"
#include "oracles.hpp"
#include "respdisp/analysis.hpp"
#include "respdisp/dispersion.hpp"
#include "respdisp/errors.hpp"
#include "respdisp/project.hpp"
#include "respdisp/qa_bench.hpp"
#include "respdisp/rss_embedding.hpp"

using namespace respdisp;
using namespace respdisp::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::u32string random_abc(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 12), ch(0, 2);
  std::u32string s(len(rng), U'a');
  for (auto& c : s) c = U'a' + static_cast<char32_t>(ch(rng));
  return s;
}

std::vector<std::pair<std::u32string, std::u32string>> corpus() {
  std::mt19937_64 rng(2024);
  std::vector<std::pair<std::u32string, std::u32string>> pairs(10000);
  for (auto& p : pairs) p = {random_abc(rng), random_abc(rng)};
  return pairs;
}

Outcome indel_oracle_equivalence() {
  Outcome o;
  const auto pairs = corpus();
  const auto t0 = Clock::now();
  std::size_t mismatches = 0;
  for (const auto& [a, b] : pairs) mismatches += indel_distance(a, b) != a.size() + b.size() - 2 * lcs_oracle(a, b);
  const double elapsed = seconds_since(t0);
  o.require(mismatches == 0, fmt::format("{} mismatches", mismatches));
  o.require(elapsed < 5.0, fmt::format("{:.2f}s >= 5s", elapsed));
  if (o.pass) o.detail = fmt::format("{} pairs, 0 mismatches, {:.3f}s", pairs.size(), elapsed);
  return o;
}

Outcome similarity_axioms() {
  Outcome o;
  std::size_t violations = 0;
  const auto pairs = corpus();
  for (const auto& [a, b] : pairs) {
    const double ab = normalized_indel_similarity(a, b).value;
    const double ba = normalized_indel_similarity(b, a).value;
    const double aa = normalized_indel_similarity(a, a).value;
    violations += ab != ba || ab < 0.0 || ab > 1.0 || (ab == 1.0) != (a == b) || aa != 1.0;
  }
  o.require(violations == 0, fmt::format("{} violations", violations));
  if (o.pass) o.detail = fmt::format("{} pairs", pairs.size());
  return o;
}

Outcome spectrum_accuracy() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(30, 30, [&] { return u(rng); });
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    const Eigen::VectorXd lambda = Eigen::VectorXd::NullaryExpr(30, [&] { return u(rng); });
    const Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
    std::vector<double> expected(30);
    for (int i = 0; i < 30; ++i) expected[i] = std::abs(lambda[i]);
    std::sort(expected.rbegin(), expected.rend());
    const auto got = singular_values(a).sigmas;
    for (int i = 0; i < 30; ++i) worst = std::max(worst, std::abs(got[i] - expected[i]) / expected[i]);
  }
  o.require(worst <= 1e-9, fmt::format("max relative error {:.3e}", worst));
  if (o.pass) o.detail = fmt::format("50 matrices, max relative error {:.2e}", worst);
  return o;
}

Outcome dispersion_analytic_cases() {
  Outcome o;
  const auto t0 = Clock::now();
  const DispersionOptions options;
  const std::vector<std::string> identical(100, "Sourdough");
  std::vector<std::string> disjoint;
  for (int i = 0; i < 20; ++i) disjoint.push_back(std::string(4, static_cast<char>('A' + i)));
  std::vector<std::string> blocks(10, "aa");
  blocks.insert(blocks.end(), 10, "zz");
  const auto c1 = response_dispersion(identical, EmbeddingKind::rss, options, "m", "c").count;
  const auto c19 = response_dispersion(disjoint, EmbeddingKind::rss, options, "m", "c").count;
  const auto c2 = response_dispersion(blocks, EmbeddingKind::rss, options, "m", "c").count;
  const double elapsed = seconds_since(t0);
  o.require(c1 == 1, fmt::format("identical -> {}", c1));
  o.require(c19 == 19, fmt::format("disjoint -> {}", c19));
  o.require(c2 == 2, fmt::format("blocks -> {}", c2));
  o.require(elapsed < 1.0, fmt::format("{:.2f}s >= 1s", elapsed));
  if (o.pass) o.detail = fmt::format("counts 1/19/2 in {:.3f}s", elapsed);
  return o;
}

Outcome threshold_monotonicity_and_scale() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0), scale(1e-3, 1e3);
  std::size_t violations = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = 3 + trial % 25;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = 1.0;
      for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = u(rng);
    }
    const double c = scale(rng);
    std::size_t previous = 0;
    for (int step = 1; step <= 20; ++step) {
      const DispersionOptions opt{.threshold = step / 20.0};
      const auto k = dispersion_of_matrix(m, EmbeddingKind::rss, opt, "m", "c").count;
      const auto ks = dispersion_of_matrix(c * m, EmbeddingKind::rss, opt, "m", "c").count;
      violations += k < previous || k != ks;
      previous = k;
    }
  }
  o.require(violations == 0, fmt::format("{} violations", violations));
  if (o.pass) o.detail = fmt::format("{} random RSS matrices x 20 thresholds", trials);
  return o;
}

Outcome spearman_checks() {
  Outcome o;
  double worst = 0.0;
  for (int n = 2; n <= 10; ++n) {
    std::vector<double> xs(n);
    std::iota(xs.begin(), xs.end(), 1.0);
    std::vector<double> ys = xs;
    std::mt19937_64 rng(n);
    int rounds = 0;
    do {
      double d2 = 0;
      for (int i = 0; i < n; ++i) d2 += (xs[i] - ys[i]) * (xs[i] - ys[i]);
      const double expected = 1.0 - 6.0 * d2 / (n * (static_cast<double>(n) * n - 1));
      worst = std::max(worst, std::abs(spearman(xs, ys) - expected));
      if (n > 6) std::shuffle(ys.begin(), ys.end(), rng);
    } while (n <= 6 ? std::next_permutation(ys.begin(), ys.end()) : ++rounds < 2000);
  }
  o.require(worst <= 1e-12, fmt::format("closed form error {:.3e}", worst));

  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> v(0, 4);
  double worst_tied = 0.0;
  for (int checked = 0; checked < 2000;) {
    const int n = 3 + checked % 10;
    std::vector<double> x(n), y(n);
    for (auto& e : x) e = v(rng);
    for (auto& e : y) e = v(rng);
    const auto rx = average_rank_oracle(x), ry = average_rank_oracle(y);
    if (std::adjacent_find(rx.begin(), rx.end(), std::not_equal_to<>()) == rx.end() ||
        std::adjacent_find(ry.begin(), ry.end(), std::not_equal_to<>()) == ry.end()) {
      continue;
    }
    worst_tied = std::max(worst_tied, std::abs(spearman(x, y) - pearson_oracle(rx, ry)));
    ++checked;
  }
  o.require(worst_tied <= 1e-12, fmt::format("tied error {:.3e}", worst_tied));
  if (o.pass) o.detail = fmt::format("max error {:.1e} (tie-free), {:.1e} (tied)", worst, worst_tied);
  return o;
}

Outcome use_case_fixture_and_baseline() {
  Outcome o;
  std::vector<DispersionResult> d;
  std::vector<CategoryAccuracy> a;
  fixture_rows(d, a);
  for (int tol : {0, 5, 10}) {
    const auto s = use_case_success(d, a, tol / 100.0);
    o.require(s.size() == use_case_fixture().size(), "category count");
    for (std::size_t c = 0; c < s.size(); ++c) {
      const int expected = pair_successes_oracle(use_case_fixture()[c], tol);
      o.require(s[c].successes == expected && s[c].pairs == 6,
                fmt::format("{} at {}%: {} vs oracle {}", s[c].category, tol, s[c].successes, expected));
    }
  }
  const auto grid = default_tolerance_grid();
  const auto first = curve_csv(tolerance_curve(d, a, grid, 0, 100));
  const auto second = curve_csv(tolerance_curve(d, a, grid, 0, 100));
  o.require(first == second, "baseline not byte-reproducible at seed 0");

  const std::vector<CategoryAccuracy> coin = {{"a", "Food", 100, 90, 0.9}, {"b", "Food", 100, 10, 0.1}};
  const double p = monte_carlo_baseline(coin, 0.0, 10000, 0)[0].fraction;
  o.require(std::abs(p - 0.5) <= 0.05, fmt::format("{{0.9, 0.1}} baseline {:.4f}", p));
  if (o.pass) o.detail = fmt::format("fixture exact at 0/5/10%, baseline reproducible, coin case {:.4f}", p);
  return o;
}

Outcome tolerance_curve_monotonicity() {
  Outcome o;
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> count(1, 8), pct(0, 100);
  std::size_t curves = 0;
  auto check = [&](const std::vector<CurvePoint>& curve) {
    ++curves;
    for (std::size_t i = 1; i < curve.size(); ++i) {
      o.require(curve[i].mean >= curve[i - 1].mean, fmt::format("drop at tolerance {}", curve[i].tolerance));
    }
  };
  std::vector<DispersionResult> fd;
  std::vector<CategoryAccuracy> fa;
  fixture_rows(fd, fa);
  const auto fixture = tolerance_curve(fd, fa, default_tolerance_grid(), 0, 100);
  check(fixture.dispersion.at(EmbeddingKind::rss));
  check(fixture.baseline);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DispersionResult> d;
    std::vector<CategoryAccuracy> a;
    for (int c = 0; c < 3; ++c) {
      for (int m = 0; m < 5; ++m) {
        DispersionResult r;
        r.model_id = "m" + std::to_string(m);
        r.category = "c" + std::to_string(c);
        r.count = count(rng);
        d.push_back(r);
        r.embedding_kind = EmbeddingKind::remote;
        r.count = count(rng);
        d.push_back(r);
        const int p = pct(rng);
        a.push_back({r.model_id, r.category, 100, static_cast<std::size_t>(p), p / 100.0});
      }
    }
    const auto report = tolerance_curve(d, a, default_tolerance_grid(), trial, 50);
    check(report.dispersion.at(EmbeddingKind::rss));
    check(report.dispersion.at(EmbeddingKind::remote));
    check(report.baseline);
  }
  if (o.pass) o.detail = fmt::format("{} curves non-decreasing", curves);
  return o;
}

Outcome grader_fixtures() {
  Outcome o;
  o.require(grade_substring("ghostbusters", "The answer is Ghostbusters 1984.") == Verdict::correct, "ghostbusters");
  o.require(grade_substring("zimbabwe and zambia", "zambia and zimbabwe") == Verdict::incorrect, "zimbabwe/zambia");
  o.require(parse_judge_reply("Yes") == Verdict::correct, "Yes");
  o.require(parse_judge_reply("no.") == Verdict::incorrect, "no.");
  for (const char* reply : {"It depends", "", "Yes and no", "Correct", "N/A"}) {
    bool raised = false;
    try {
      parse_judge_reply(reply);
    } catch (const JudgeProtocolError& e) {
      raised = e.raw_reply() == reply;
    }
    o.require(raised, fmt::format("no protocol error for \"{}\"", reply));
  }
  if (o.pass) o.detail = "substring and judge-protocol fixtures";
  return o;
}

Outcome curation_rules() {
  Outcome o;
  const std::string raw =
      "Animals: Largest land mammal?*Elephant\n"
      "Anime: Pikachu evolves into?*Raichu\n"
      "Videogame: Plumber hero of Nintendo?*Mario\n"
      "Religion/Mythology: Greek god of the sea?*Poseidon\n"
      "Mythology: King of the Norse gods?*Odin\n"
      "Movies - Quote: I'll be back?*The Terminator\n"
      "Music - Name the artist: Thriller?*Michael Jackson\n"
      "Music - Name the movie: My Heart Will Go On?*Titanic\n"
      "Music - Finish these lyrics: Is this the real life?*Is this just fantasy\n"
      "Geography: Name a Scandinavian country*Norway*Sweden\n"
      "TV: Springfield family name?*Simpson\n";
  const std::vector<TriviaItem> expected = {
      {"ircwt-00001", "Animals", "Largest land mammal?", "Elephant"},
      {"ircwt-00006", "Movies", "I'll be back?", "The Terminator"},
      {"ircwt-00007", "Music", "Thriller?", "Michael Jackson"},
      {"ircwt-00008", "Music", "My Heart Will Go On?", "Titanic"},
      {"ircwt-00009", "Music", "Is this the real life?", "Is this just fantasy"},
      {"ircwt-00011", "TV", "Springfield family name?", "Simpson"},
  };
  const auto curated = curate_dataset(parse_raw_dataset(raw));
  o.require(curated == expected, fmt::format("{} survivors, expected {}", curated.size(), expected.size()));
  std::vector<RawTriviaItem> again;
  for (const auto& item : curated) again.push_back(to_raw(item));
  o.require(curate_dataset(again) == curated, "not idempotent");

  const auto audit = audit_categories(curated);
  o.require(!audit.all_match() && render_audit(audit).find("MISMATCH") != std::string::npos,
            "count mismatches not flagged");
  if (o.pass) o.detail = "5 rules, idempotent, audit flags mismatches";
  return o;
}

Outcome end_to_end_offline_determinism() {
  Outcome o;
  const auto t0 = Clock::now();
  TempDir dir("respdisp-acceptance");
  const ProjectConfig config = populate_demo_project(dir.path());
  std::vector<std::map<std::string, std::string>> bundles;
  std::uint64_t calls = 0;
  for (int run = 0; run < 2; ++run) {
    for (const auto& status : {cmd_collect(config, {}, {}, {}), cmd_dispersion(config, {}),
                               cmd_bench(config, {}, {}), cmd_report(config)}) {
      o.require(status.ok(), "offline command failed");
      calls += status.provider_calls;
    }
    bundles.push_back(read_report_bundle(config));
  }
  const double elapsed = seconds_since(t0);
  o.require(calls == 0, fmt::format("{} provider calls offline", calls));
  o.require(bundles[0] == bundles[1] && bundles[0].size() == 4, "report bundles differ");
  o.require(elapsed < 60.0, fmt::format("{:.1f}s >= 60s", elapsed));
  if (o.pass) o.detail = fmt::format("{} report files identical across runs, {:.2f}s", bundles[0].size(), elapsed);
  return o;
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"indel-oracle-equivalence", indel_oracle_equivalence},
      {"similarity-axioms", similarity_axioms},
      {"spectrum-accuracy", spectrum_accuracy},
      {"dispersion-analytic-cases", dispersion_analytic_cases},
      {"threshold-monotonicity-scale-invariance", threshold_monotonicity_and_scale},
      {"spearman", spearman_checks},
      {"use-case-fixture-and-baseline", use_case_fixture_and_baseline},
      {"tolerance-curve-monotonicity", tolerance_curve_monotonicity},
      {"grader-fixtures", grader_fixtures},
      {"curation-rules", curation_rules},
      {"end-to-end-offline-determinism", end_to_end_offline_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.pass;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << "\n";
  }
  std::cout << "N/A  published-headline-numbers: need paid API runs over 13 models and hand labels\n";
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
