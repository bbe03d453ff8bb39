#include "respdisp/rss_embedding.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <thread>
#include <unordered_map>

#include "respdisp/errors.hpp"
#include "respdisp/text.hpp"

namespace respdisp {

namespace {

// Match masks of the pattern: for every distinct code point, one bit per
// pattern position, packed into 64-bit words.
class PatternMasks {
 public:
  explicit PatternMasks(std::u32string_view pattern)
      : words_((pattern.size() + 63) / 64) {
    for (std::size_t pos = 0; pos < pattern.size(); ++pos) {
      auto [it, inserted] = index_.try_emplace(pattern[pos], masks_.size() / words_);
      if (inserted) masks_.resize(masks_.size() + words_, 0);
      masks_[it->second * words_ + pos / 64] |= std::uint64_t{1} << (pos % 64);
    }
  }

  std::size_t words() const { return words_; }

  // nullptr when the code point does not occur in the pattern.
  const std::uint64_t* find(char32_t cp) const {
    const auto it = index_.find(cp);
    return it == index_.end() ? nullptr : masks_.data() + it->second * words_;
  }

 private:
  std::size_t words_;
  std::unordered_map<char32_t, std::size_t> index_;
  std::vector<std::uint64_t> masks_;
};

}  // namespace

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return 0;

  const PatternMasks masks(a);
  const std::size_t words = masks.words();
  // Zero bits in `v` mark pattern positions that extend the current LCS.
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});

  for (char32_t cp : b) {
    const std::uint64_t* match = masks.find(cp);
    if (match == nullptr) continue;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & match[w];
      const std::uint64_t sum = v[w] + u;
      const std::uint64_t with_carry = sum + carry;
      const std::uint64_t next_carry = (sum < v[w]) || (with_carry < sum) ? 1 : 0;
      v[w] = with_carry | (v[w] & ~match[w]);
      carry = next_carry;
    }
  }

  std::size_t zeros = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t word = v[w];
    const std::size_t used = (w + 1 == words && a.size() % 64 != 0) ? a.size() % 64 : 64;
    if (used < 64) word |= ~std::uint64_t{0} << used;
    zeros += static_cast<std::size_t>(std::popcount(~word));
  }
  return zeros;
}

std::size_t indel_distance(std::u32string_view a, std::u32string_view b) {
  return a.size() + b.size() - 2 * lcs_length(a, b);
}

std::size_t indel_distance(std::string_view a, std::string_view b) {
  return indel_distance(text::decode_utf8(a), text::decode_utf8(b));
}

SimilarityScore normalized_indel_similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return {1.0};
  const std::size_t distance = indel_distance(a, b);
  return {1.0 - static_cast<double>(distance) / static_cast<double>(total)};
}

SimilarityScore normalized_indel_similarity(std::string_view a, std::string_view b) {
  return normalized_indel_similarity(text::decode_utf8(a), text::decode_utf8(b));
}

RssMatrix rss_matrix(std::span<const std::string> responses, unsigned threads) {
  if (responses.empty()) throw DomainError("rss_matrix: response list is empty");

  RssMatrix out;
  out.responses.reserve(responses.size());
  std::vector<std::u32string> decoded;
  decoded.reserve(responses.size());
  for (const auto& r : responses) {
    out.responses.push_back(text::trim(r));
    decoded.push_back(text::decode_utf8(out.responses.back()));
  }

  const auto n = static_cast<Eigen::Index>(responses.size());
  out.entries = Eigen::MatrixXd::Identity(n, n);

  // Each (i, j > i) entry is computed independently and written once, so the
  // fill is identical for any thread count.
  std::atomic<Eigen::Index> next_row{0};
  auto fill_rows = [&] {
    for (Eigen::Index i = next_row++; i < n; i = next_row++) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double s = normalized_indel_similarity(decoded[static_cast<std::size_t>(i)],
                                                     decoded[static_cast<std::size_t>(j)])
                             .value;
        out.entries(i, j) = s;
        out.entries(j, i) = s;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<Eigen::Index>(threads, std::max<Eigen::Index>(1, n / 16)));
  if (threads <= 1) {
    fill_rows();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(fill_rows);
  }
  return out;
}

}  // namespace respdisp
