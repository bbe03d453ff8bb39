#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace respdisp {

/// Similarity in [0, 1]; 1 exactly when both texts are the same sequence of
/// Unicode scalar values.
struct SimilarityScore {
  double value = 0.0;
  friend bool operator==(const SimilarityScore&, const SimilarityScore&) = default;
};

/// Reference-sentence-similarity matrix where the reference sentences are the
/// responses themselves: entries(i, j) = similarity(responses[i], responses[j]).
/// Row i is the embedding of responses[i].
struct RssMatrix {
  Eigen::MatrixXd entries;
  std::vector<std::string> responses;  // trimmed, in input order
};

/// Insertions plus deletions needed to turn `a` into `b`, i.e.
/// |a| + |b| - 2 * LCS(a, b). Bit-parallel LCS; memory is O(min(|a|, |b|)).
std::size_t indel_distance(std::u32string_view a, std::u32string_view b);

/// UTF-8 overload; texts are compared as Unicode scalar values, not bytes.
std::size_t indel_distance(std::string_view a, std::string_view b);

/// Longest-common-subsequence length; the kernel behind indel_distance.
std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

/// 1 - indel_distance / (|a| + |b|); two empty texts score 1.
SimilarityScore normalized_indel_similarity(std::u32string_view a, std::u32string_view b);
SimilarityScore normalized_indel_similarity(std::string_view a, std::string_view b);

/// Builds the n x n RSS matrix. Responses are trimmed of surrounding
/// whitespace (case is kept). Throws DomainError on an empty list.
/// `threads` = 0 picks the hardware concurrency; the result does not depend
/// on the thread count.
RssMatrix rss_matrix(std::span<const std::string> responses, unsigned threads = 0);

}  // namespace respdisp
