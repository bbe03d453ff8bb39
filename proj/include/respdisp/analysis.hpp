#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "respdisp/dispersion.hpp"
#include "respdisp/qa_bench.hpp"

namespace respdisp {

/// Accuracy comparisons use this slack so that rational accuracies such as
/// 0.65 vs 0.70 at tolerance 0.05 are not decided by binary rounding.
inline constexpr double kAccuracyEpsilon = 1e-12;

/// acc_chosen >= acc_other - tolerance.
bool tolerance_success(double acc_chosen, double acc_other, double tolerance);

struct PairOutcome {
  std::string category;
  std::string model_a;
  std::string model_b;
  std::string chosen;  // lower dispersion; on a tie the smaller model id
  double tolerance = 0.0;
  bool tie = false;
  bool success = false;
};

/// One use-case comparison. The model with strictly lower dispersion is
/// chosen; on a tie success requires the tolerance rule to hold in both
/// orientations. Throws DomainError on a category or embedding-kind mismatch,
/// or a tolerance outside [0, 1].
PairOutcome compare_pair(const DispersionResult& a, const DispersionResult& b, double acc_a, double acc_b,
                         double tolerance);

struct CategorySuccess {
  std::string category;
  std::size_t pairs = 0;
  double successes = 0.0;  // fractional for the Monte Carlo average
  double fraction = 0.0;
};

/// Success fraction over every unordered model pair of each category, using
/// models that have both a dispersion and an accuracy there. Dispersions must
/// share one embedding kind. Categories with fewer than 2 such models are
/// skipped with a warning. Sorted by category.
std::vector<CategorySuccess> use_case_success(std::span<const DispersionResult> dispersions,
                                              std::span<const CategoryAccuracy> accuracies, double tolerance);

/// Random-choice baseline: `iterations` rounds in which every unordered pair
/// picks its chosen model by coin flip. The generator is std::mt19937_64
/// seeded per category from (rng_seed, FNV-1a of the category name); each
/// flip is the top bit of one draw.
std::vector<CategorySuccess> monte_carlo_baseline(std::span<const CategoryAccuracy> accuracies, double tolerance,
                                                  std::size_t iterations, std::uint64_t rng_seed);

inline constexpr std::string_view kRngAlgorithm = "mt19937_64/seed_seq(seed,fnv1a(category))/top-bit";

/// Tie-aware Spearman coefficient: Pearson correlation of average ranks.
/// Throws DomainError on length mismatch, fewer than 2 values, or a constant
/// vector.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

enum class RankDirection { lower_better, higher_better };

struct RankedModel {
  std::string model_id;
  double value = 0.0;
  double rank = 0.0;  // average rank among ties
};

/// Stable ordering best-first; ties keep input order and share their mean rank.
std::vector<RankedModel> rank_models(std::span<const std::pair<std::string, double>> metric, RankDirection direction);

struct CurvePoint {
  double tolerance = 0.0;
  std::vector<CategorySuccess> categories;
  double mean = 0.0;  // unweighted mean over categories
};

struct UseCaseReport {
  std::vector<double> grid;
  std::map<EmbeddingKind, std::vector<CurvePoint>> dispersion;  // kinds present in the input
  std::vector<CurvePoint> baseline;
  std::uint64_t rng_seed = 0;
  std::size_t iterations = 100;
  std::string rng_algorithm{kRngAlgorithm};
};

/// 0, 0.01, ..., 1.
std::vector<double> default_tolerance_grid();

/// "0,0.05,0.1" or "start:stop:step". Values must lie in [0, 1] and ascend.
std::vector<double> parse_tolerance_grid(std::string_view text);

/// Success (per category and averaged) at every grid point for each embedding
/// kind present in `dispersions`, plus the Monte Carlo baseline.
UseCaseReport tolerance_curve(std::span<const DispersionResult> dispersions,
                              std::span<const CategoryAccuracy> accuracies, std::span<const double> grid,
                              std::uint64_t rng_seed, std::size_t iterations = 100);

/// CSV with columns tolerance,rss_success,remote_success,baseline; a missing
/// embedding kind leaves its column empty.
std::string curve_csv(const UseCaseReport& report);

}  // namespace respdisp
