#include "respdisp/dispersion.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "respdisp/errors.hpp"
#include "respdisp/gateway/provider.hpp"
#include "respdisp/rss_embedding.hpp"
#include "respdisp/text.hpp"

namespace respdisp {

std::string_view to_string(EmbeddingKind kind) {
  return kind == EmbeddingKind::rss ? "rss" : "remote";
}

std::optional<EmbeddingKind> parse_embedding_kind(std::string_view name) {
  if (name == "rss") return EmbeddingKind::rss;
  if (name == "remote") return EmbeddingKind::remote;
  return std::nullopt;
}

Spectrum singular_values(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) throw DomainError("singular_values: empty matrix");
  if (!m.allFinite()) throw DomainError("singular_values: matrix has non-finite entries");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& values = svd.singularValues();
  Spectrum out;
  out.sigmas.assign(values.data(), values.data() + values.size());
  for (double& s : out.sigmas) s = std::max(s, 0.0);
  std::sort(out.sigmas.begin(), out.sigmas.end(), std::greater<>());
  return out;
}

Spectrum singular_values(std::span<const std::vector<double>> rows) {
  if (rows.empty() || rows.front().empty()) throw DomainError("singular_values: empty matrix");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw DomainError("singular_values: ragged matrix (row " + std::to_string(i) + ")");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return singular_values(m);
}

namespace {

// Per-value variance weights after zeroing numerically-null singular values.
std::vector<double> variance_weights(const Spectrum& spectrum, VarianceConvention convention) {
  const double sigma_max = spectrum.sigmas.empty() ? 0.0 : spectrum.sigmas.front();
  std::vector<double> weights;
  weights.reserve(spectrum.sigmas.size());
  for (double s : spectrum.sigmas) {
    if (!(s > 0.0) || s < kRankTolerance * sigma_max) {
      weights.push_back(0.0);
    } else {
      weights.push_back(convention == VarianceConvention::squared ? s * s : s);
    }
  }
  return weights;
}

}  // namespace

std::size_t numerical_rank(const Spectrum& spectrum) {
  const auto weights = variance_weights(spectrum, VarianceConvention::raw);
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
}

std::size_t explained_variance_count(const Spectrum& spectrum, double threshold, VarianceConvention convention) {
  if (spectrum.sigmas.empty()) throw DomainError("explained_variance_count: empty spectrum");
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw DomainError("explained_variance_count: threshold must lie in (0, 1]");
  }
  for (std::size_t i = 0; i < spectrum.sigmas.size(); ++i) {
    const double s = spectrum.sigmas[i];
    if (!std::isfinite(s) || s < 0.0 || (i > 0 && s > spectrum.sigmas[i - 1])) {
      throw DomainError("explained_variance_count: spectrum must be finite, non-negative and non-increasing");
    }
  }

  const std::vector<double> weights = variance_weights(spectrum, convention);
  // tail[k] = variance not explained by the leading k values. Summing from the
  // back makes tail[rank] exactly 0, so threshold 1.0 yields the rank.
  std::vector<double> tail(weights.size() + 1, 0.0);
  for (std::size_t k = weights.size(); k-- > 0;) tail[k] = tail[k + 1] + weights[k];
  const double total = tail[0];
  if (!(total > 0.0)) throw DomainError("explained_variance_count: spectrum has no variance to explain");

  const double allowed = (1.0 - threshold) * total;
  for (std::size_t k = 1; k <= weights.size(); ++k) {
    if (tail[k] <= allowed) return k;
  }
  return weights.size();
}

DispersionResult dispersion_of_matrix(const Eigen::MatrixXd& embeddings, EmbeddingKind kind,
                                      const DispersionOptions& options, std::string model_id,
                                      std::string category) {
  Spectrum spectrum;
  if (options.center_columns && embeddings.rows() > 0) {
    const Eigen::MatrixXd centered = embeddings.rowwise() - embeddings.colwise().mean();
    spectrum = singular_values(centered);
  } else {
    spectrum = singular_values(embeddings);
  }

  DispersionResult result;
  result.model_id = std::move(model_id);
  result.category = std::move(category);
  result.embedding_kind = kind;
  result.threshold = options.threshold;
  result.count = explained_variance_count(spectrum, options.threshold, options.convention);
  result.n_responses = static_cast<std::size_t>(embeddings.rows());
  result.spectrum = std::move(spectrum);
  result.convention = options.convention;
  result.centered = options.center_columns;
  return result;
}

DispersionResult response_dispersion(std::span<const std::string> responses, EmbeddingKind kind,
                                     const DispersionOptions& options, std::string model_id,
                                     std::string category, EmbeddingProvider* remote) {
  if (responses.size() < 2) {
    throw DomainError("response_dispersion: need at least 2 responses, got " + std::to_string(responses.size()));
  }
  if (kind == EmbeddingKind::rss) {
    const RssMatrix rss = rss_matrix(responses);
    return dispersion_of_matrix(rss.entries, kind, options, std::move(model_id), std::move(category));
  }

  if (remote == nullptr) throw DomainError("response_dispersion: remote embedding kind needs an embedding provider");
  std::vector<std::string> trimmed;
  trimmed.reserve(responses.size());
  for (const auto& r : responses) trimmed.push_back(text::trim(r));
  const Eigen::MatrixXd embeddings = embed_texts(*remote, trimmed);
  return dispersion_of_matrix(embeddings, kind, options, std::move(model_id), std::move(category));
}

}  // namespace respdisp
