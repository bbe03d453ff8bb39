#include <chrono>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "respdisp/errors.hpp"
#include "respdisp/rss_embedding.hpp"

using namespace respdisp;
using respdisp::testing::lcs_oracle;

namespace {

std::u32string random_string(std::mt19937& rng, std::size_t max_len, char32_t alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> ch(0, static_cast<int>(alphabet) - 1);
  std::u32string s(len(rng), U'a');
  for (auto& c : s) c = U'a' + static_cast<char32_t>(ch(rng));
  return s;
}

}  // namespace

TEST(IndelDistance, Examples) {
  EXPECT_EQ(indel_distance(std::string_view("abc"), std::string_view("abc")), 0u);
  EXPECT_EQ(indel_distance(std::string_view(""), std::string_view("abc")), 3u);
  EXPECT_EQ(indel_distance(std::string_view("kitten"), std::string_view("sitting")), 5u);
}

TEST(IndelDistance, MatchesDynamicProgrammingOracle) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto a = random_string(rng, 12, 3);
    const auto b = random_string(rng, 12, 3);
    const std::size_t lcs = lcs_oracle(a, b);
    ASSERT_EQ(lcs_length(a, b), lcs);
    ASSERT_EQ(indel_distance(a, b), a.size() + b.size() - 2 * lcs);
  }
}

TEST(IndelDistance, LongStringsCrossWordBoundaries) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_string(rng, 300, 4);
    const auto b = random_string(rng, 300, 4);
    ASSERT_EQ(lcs_length(a, b), lcs_oracle(a, b)) << "trial " << trial;
  }
}

TEST(IndelDistance, ComparesCodePointsNotBytes) {
  // "é" is two UTF-8 bytes but one character.
  EXPECT_EQ(indel_distance(std::string_view("caf\xc3\xa9"), std::string_view("cafe")), 2u);
  EXPECT_EQ(indel_distance(std::string_view("\xe2\x82\xac"), std::string_view("")), 1u);
}

TEST(Similarity, Examples) {
  EXPECT_DOUBLE_EQ(normalized_indel_similarity(std::string_view("abc"), std::string_view("abc")).value, 1.0);
  EXPECT_DOUBLE_EQ(normalized_indel_similarity(std::string_view("abc"), std::string_view("xyz")).value, 0.0);
  EXPECT_DOUBLE_EQ(normalized_indel_similarity(std::string_view("kitten"), std::string_view("sitting")).value,
                   8.0 / 13.0);
  EXPECT_DOUBLE_EQ(normalized_indel_similarity(std::string_view("flaw"), std::string_view("lawn")).value, 0.75);
  EXPECT_DOUBLE_EQ(normalized_indel_similarity(std::string_view(""), std::string_view("")).value, 1.0);
}

TEST(Similarity, Axioms) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto a = random_string(rng, 12, 3);
    const auto b = random_string(rng, 12, 3);
    const double ab = normalized_indel_similarity(a, b).value;
    ASSERT_EQ(ab, normalized_indel_similarity(b, a).value);
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0);
    ASSERT_EQ(ab == 1.0, a == b);
  }
}

TEST(RssMatrix, Examples) {
  const std::vector<std::string> same = {"a", "a", "a"};
  EXPECT_TRUE(rss_matrix(same).entries.isApprox(Eigen::MatrixXd::Ones(3, 3)));

  const std::vector<std::string> two = {"ab", "cd"};
  EXPECT_TRUE(rss_matrix(two).entries.isApprox(Eigen::MatrixXd::Identity(2, 2)));

  const std::vector<std::string> three = {"ab", "ab", "cd"};
  Eigen::MatrixXd expected(3, 3);
  expected << 1, 1, 0, 1, 1, 0, 0, 0, 1;
  EXPECT_EQ(rss_matrix(three).entries, expected);
}

TEST(RssMatrix, TrimsResponses) {
  const std::vector<std::string> r = {"  Jazz\n", "Jazz"};
  const auto m = rss_matrix(r);
  EXPECT_EQ(m.responses[0], "Jazz");
  EXPECT_EQ(m.entries(0, 1), 1.0);
}

TEST(RssMatrix, EmptyInputRejected) { EXPECT_THROW(rss_matrix({}), DomainError); }

TEST(RssMatrix, SymmetricUnitDiagonalAndThreadIndependent) {
  std::mt19937 rng(5);
  std::vector<std::string> responses;
  for (int i = 0; i < 120; ++i) {
    std::string s;
    for (char32_t c : random_string(rng, 20, 5)) s += static_cast<char>(c);
    responses.push_back(s);
  }
  const auto serial = rss_matrix(responses, 1).entries;
  const auto parallel = rss_matrix(responses, 8).entries;
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(serial, serial.transpose());
  for (Eigen::Index i = 0; i < serial.rows(); ++i) EXPECT_EQ(serial(i, i), 1.0);
}
