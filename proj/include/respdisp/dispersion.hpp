#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace respdisp {

class EmbeddingProvider;

enum class EmbeddingKind { rss, remote };

std::string_view to_string(EmbeddingKind kind);
std::optional<EmbeddingKind> parse_embedding_kind(std::string_view name);

/// Singular values, non-increasing, all >= 0.
struct Spectrum {
  std::vector<double> sigmas;
};

enum class VarianceConvention {
  squared,  // fraction of sum(sigma^2); the PCA convention
  raw,      // fraction of sum(sigma)
};

struct DispersionOptions {
  double threshold = 0.95;
  VarianceConvention convention = VarianceConvention::squared;
  bool center_columns = false;
};

struct DispersionResult {
  std::string model_id;
  std::string category;
  EmbeddingKind embedding_kind = EmbeddingKind::rss;
  double threshold = 0.95;
  std::size_t count = 0;
  std::size_t n_responses = 0;
  Spectrum spectrum;
  VarianceConvention convention = VarianceConvention::squared;
  bool centered = false;
};

/// Singular values below this fraction of the largest are numerically zero.
inline constexpr double kRankTolerance = 1e-12;

/// All min(rows, cols) singular values, descending. Throws DomainError for an
/// empty matrix or non-finite entries.
Spectrum singular_values(const Eigen::MatrixXd& m);

/// Row-major nested input; additionally rejects ragged rows.
Spectrum singular_values(std::span<const std::vector<double>> rows);

/// Smallest k whose leading k singular values explain at least `threshold`
/// of the total variance. Throws DomainError if the spectrum carries no
/// variance or the threshold is outside (0, 1].
std::size_t explained_variance_count(const Spectrum& spectrum, double threshold,
                                     VarianceConvention convention = VarianceConvention::squared);

/// Numerical rank: singular values above kRankTolerance * sigma_max.
std::size_t numerical_rank(const Spectrum& spectrum);

/// Dispersion of an already-built embedding matrix (one row per response).
DispersionResult dispersion_of_matrix(const Eigen::MatrixXd& embeddings, EmbeddingKind kind,
                                      const DispersionOptions& options, std::string model_id,
                                      std::string category);

/// Response dispersion of one (model, category) response set: embed, take the
/// spectrum, count singular values at the threshold. `remote` is required
/// for EmbeddingKind::remote and ignored for rss. Needs at least 2 responses.
DispersionResult response_dispersion(std::span<const std::string> responses, EmbeddingKind kind,
                                     const DispersionOptions& options, std::string model_id,
                                     std::string category, EmbeddingProvider* remote = nullptr);

}  // namespace respdisp
