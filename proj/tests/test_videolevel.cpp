#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "vcd/simmatrix.hpp"
#include "vcd/videolevel.hpp"

namespace vcd {
namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back("v" + std::to_string(k));
  return out;
}

TEST(EnumeratePairs, Counts) {
  EXPECT_EQ(enumerate_pairs(ids(2)).size(), 1u);
  EXPECT_EQ(enumerate_pairs(ids(1099)).size(), 603351u);
  EXPECT_EQ(unordered_pair_count(1099), 603351u);
}

TEST(EnumeratePairs, MatchesDoubleLoop) {
  const auto got = enumerate_pairs(ids(10));
  std::vector<std::pair<std::size_t, std::size_t>> want;
  for (std::size_t a = 0; a < 10; ++a) {
    for (std::size_t b = 0; b < 10; ++b) {
      if (a < b) want.emplace_back(a, b);
    }
  }
  EXPECT_EQ(got, want);
  EXPECT_EQ(got.size(), 45u);
}

TEST(EnumeratePairs, DuplicateIdsRejected) {
  const std::vector<std::string> dup{"a", "b", "a"};
  try {
    enumerate_pairs(dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
  }
}

TEST(F2F, SharedFrameScoresOne) {
  std::mt19937_64 rng(1);
  const auto a = testing::random_sequence("a", 12, 16, rng);
  const auto base = testing::random_sequence("b", 5, 16, rng);
  std::vector<double> bv(base.values().begin(), base.values().end());
  std::copy(a.frame(7).begin(), a.frame(7).end(), bv.begin() + 32);
  const FrameFeatureSequence b("b", 16, bv);
  EXPECT_NEAR(f2f_score(a, b), 1.0, 1e-12);
}

TEST(F2F, OrthogonalFramesScoreZero) {
  FrameFeatureSequence a("a", 4, {1, 0, 0, 0, 0, 1, 0, 0});
  FrameFeatureSequence b("b", 4, {0, 0, 1, 0, 0, 0, 0, 1});
  EXPECT_EQ(f2f_score(a, b), 0.0);
}

TEST(F2F, EqualsMatrixMaximum) {
  std::mt19937_64 rng(2);
  const auto a = testing::random_sequence("a", 20, 8, rng);
  const auto b = testing::random_sequence("b", 15, 8, rng);
  const auto s = compute_similarity_matrix(a, b);
  EXPECT_DOUBLE_EQ(f2f_score(a, b), *std::max_element(s.values().begin(), s.values().end()));
  EXPECT_DOUBLE_EQ(f2f_score(a, b), f2f_score(b, a));
}

TEST(F2F, DimensionMismatch) {
  FrameFeatureSequence a("a", 2, {1, 0});
  FrameFeatureSequence b("b", 3, {1, 0, 0});
  EXPECT_THROW(f2f_score(a, b), Error);
}

std::vector<double> oracle_mean(const FrameFeatureSequence& v, std::size_t b, std::size_t e) {
  std::vector<double> m(v.dim(), 0.0);
  for (std::size_t f = b; f < e; ++f) {
    for (std::size_t d = 0; d < v.dim(); ++d) m[d] += v.frame(f)[d];
  }
  double n = 0;
  for (double x : m) n += x * x;
  for (double& x : m) x /= std::sqrt(n);
  return m;
}

double oracle_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

TEST(G2G, SelfAndNegated) {
  std::mt19937_64 rng(3);
  const auto a = testing::random_sequence("a", 9, 8, rng);
  EXPECT_NEAR(g2g_score(a, a), 1.0, 1e-12);
  std::vector<double> neg(a.values().begin(), a.values().end());
  for (auto& x : neg) x = -x;
  EXPECT_NEAR(g2g_score(a, FrameFeatureSequence("n", 8, neg)), -1.0, 1e-12);
}

TEST(G2G, MatchesMeanThenCosineOracle) {
  std::mt19937_64 rng(4);
  const auto a = testing::random_sequence("a", 13, 8, rng);
  const auto b = testing::random_sequence("b", 7, 8, rng);
  EXPECT_NEAR(g2g_score(a, b), oracle_dot(oracle_mean(a, 0, 13), oracle_mean(b, 0, 7)), 1e-9);
  EXPECT_NEAR(g2g_score(a, b), g2g_score(b, a), 1e-12);
}

TEST(G2G, ZeroMeanIsError) {
  FrameFeatureSequence a("a", 2, {1, 0, -1, 0});
  FrameFeatureSequence b("b", 2, {1, 0});
  try {
    g2g_score(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVector);
  }
}

TEST(SM2G, QueryEqualToAWindowScoresOne) {
  std::mt19937_64 rng(5);
  const auto ref = testing::random_sequence("r", 30, 8, rng);
  const auto query = ref.slice("q", 10, 20);
  EXPECT_NEAR(sm2g_score(ref, query, 10), 1.0, 1e-12);
}

TEST(SM2G, WideWindowDegeneratesToG2G) {
  std::mt19937_64 rng(6);
  const auto ref = testing::random_sequence("r", 17, 8, rng);
  const auto query = testing::random_sequence("q", 6, 8, rng);
  EXPECT_NEAR(sm2g_score(ref, query, 17), g2g_score(ref, query), 1e-12);
  EXPECT_NEAR(sm2g_score(ref, query, 100), g2g_score(ref, query), 1e-12);
}

TEST(SM2G, MatchesWindowEnumeration) {
  std::mt19937_64 rng(7);
  const auto ref = testing::random_sequence("r", 35, 8, rng);
  const auto query = testing::random_sequence("q", 10, 8, rng);
  const auto g = oracle_mean(query, 0, 10);
  double best = -2;
  for (std::size_t b : {0u, 10u, 20u, 30u}) best = std::max(best, oracle_dot(oracle_mean(ref, b, std::min<std::size_t>(b + 10, 35)), g));
  EXPECT_NEAR(sm2g_score(ref, query, 10), best, 1e-9);
}

TEST(SM2G, IsDirectional) {
  std::mt19937_64 rng(8);
  const auto a = testing::random_sequence("a", 40, 8, rng);
  const auto b = testing::random_sequence("b", 25, 8, rng);
  EXPECT_NE(sm2g_score(a, b, 10), sm2g_score(b, a, 10));
  EXPECT_EQ(video_score(VideoScorer::kSM2G, a, b, 10, ChunkSide::kQuery), sm2g_score(b, a, 10));
}

TEST(Scores, StayInRange) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 50; ++k) {
    const auto a = testing::random_sequence("a", 1 + rng() % 30, 4, rng);
    const auto b = testing::random_sequence("b", 1 + rng() % 30, 4, rng);
    for (auto s : kAllVideoScorers) {
      const double v = video_score(s, a, b);
      EXPECT_GE(v, -1.0 - 1e-9);
      EXPECT_LE(v, 1.0 + 1e-9);
    }
  }
}

TEST(Labels, FromAnnotationsAndCsv) {
  std::vector<PairAnnotation> pairs{{"q", "r", {{0, 1, 0, 1}}}, {"q", "s", {}}};
  const auto labels = labels_from_annotations(pairs);
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_TRUE(labels[0].is_copy);
  EXPECT_FALSE(labels[1].is_copy);
  EXPECT_EQ(labels_csv(labels), "query_id,ref_id,is_copy\nq,r,1\nq,s,0\n");
  std::vector<PairScore> scores{{"q", "r", 0.5}};
  EXPECT_EQ(scores_csv(scores, VideoScorer::kG2G), "query_id,ref_id,method,score\nq,r,g2g,0.500000000\n");
}

}  // namespace
}  // namespace vcd
