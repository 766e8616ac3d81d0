#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "test_util.hpp"
#include "vcd/align.hpp"

namespace vcd {
namespace {

AlignParams params_for(AlignMethod m, double thr = 0.5, int gap = 2, int len = 2) {
  AlignParams p;
  p.method = m;
  p.sim_threshold = thr;
  p.max_gap = gap;
  p.min_length = len;
  return p;
}

SimilarityMatrix identity(std::size_t n) {
  SimilarityMatrix s(n, n, 0.0);
  for (std::size_t k = 0; k < n; ++k) s(k, k) = 1.0;
  return s;
}

bool overlaps(const CopySegmentPair& a, const CopySegmentPair& b) {
  return a.query_start < b.query_end && b.query_start < a.query_end &&
         a.ref_start < b.ref_end && b.ref_start < a.ref_end;
}

class EveryMethod : public ::testing::TestWithParam<AlignMethod> {};

TEST_P(EveryMethod, IdentityGivesFullDiagonal) {
  const auto out = align(identity(10), params_for(GetParam()));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].segment, (CopySegmentPair{0, 10, 0, 10}));
}

TEST_P(EveryMethod, AllZerosGivesNothing) {
  EXPECT_TRUE(align(SimilarityMatrix(12, 9, 0.0), params_for(GetParam())).empty());
}

TEST_P(EveryMethod, RejectsOtherMethodsParams) {
  const auto other = GetParam() == AlignMethod::kDtw ? AlignMethod::kHoughVoting : AlignMethod::kDtw;
  const auto p = params_for(other);
  const auto s = identity(4);
  switch (GetParam()) {
    case AlignMethod::kHoughVoting: EXPECT_THROW(hough_voting(s, p), Error); break;
    case AlignMethod::kTemporalNetwork: EXPECT_THROW(temporal_network(s, p), Error); break;
    case AlignMethod::kDynamicProgramming: EXPECT_THROW(dynamic_programming(s, p), Error); break;
    case AlignMethod::kDtw: EXPECT_THROW(dtw_align(s, p), Error); break;
  }
}

TEST_P(EveryMethod, PerfectPlantRecovery) {
  std::mt19937_64 rng(100 + static_cast<int>(GetParam()));
  for (int trial = 0; trial < 50; ++trial) {
    const double thr = 0.5;
    const std::size_t n = 20 + rng() % 30;
    const std::size_t m = 10 + rng() % 20;
    auto s = testing::random_matrix(n, m, -0.3, thr - 0.1, rng);
    const auto len = static_cast<std::int32_t>(2 + rng() % (std::min(n, m) - 1));
    const auto qs = static_cast<std::int32_t>(rng() % (m - len + 1));
    const auto rs = static_cast<std::int32_t>(rng() % (n - len + 1));
    for (std::int32_t k = 0; k < len; ++k) s(rs + k, qs + k) = 1.0;
    const CopySegmentPair plant{qs, qs + len, rs, rs + len};
    const auto out = align(s, params_for(GetParam(), thr, 2, 2));
    ASSERT_EQ(out.size(), 1u) << "trial " << trial;
    EXPECT_TRUE(overlaps(out[0].segment, plant));
  }
}

TEST_P(EveryMethod, OutputInvariantsOnRandomMatrices) {
  std::mt19937_64 rng(200 + static_cast<int>(GetParam()));
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 25;
    const std::size_t m = 1 + rng() % 25;
    const auto s = testing::random_matrix(n, m, -1, 1, rng);
    auto p = params_for(GetParam(), 0.3 + 0.1 * static_cast<double>(rng() % 5),
                        1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3));
    const auto out = align(s, p);
    EXPECT_EQ(align(s, p), out);
    for (std::size_t a = 0; a < out.size(); ++a) {
      const auto& g = out[a].segment;
      EXPECT_GE(g.query_start, 0);
      EXPECT_LE(g.query_end, static_cast<std::int32_t>(m));
      EXPECT_GE(g.ref_start, 0);
      EXPECT_LE(g.ref_end, static_cast<std::int32_t>(n));
      EXPECT_GE(g.query_length(), p.min_length);
      EXPECT_GE(g.ref_length(), p.min_length);
      if (a > 0) EXPECT_GE(out[a - 1].score, out[a].score);
      for (std::size_t b = 0; b < a; ++b) EXPECT_FALSE(overlaps(out[b].segment, g));
    }
  }
}

TEST_P(EveryMethod, CandidatesShareAcrossMinLengths) {
  std::mt19937_64 rng(50 + static_cast<int>(GetParam()));
  for (int trial = 0; trial < 40; ++trial) {
    auto s = testing::random_matrix(10 + rng() % 30, 10 + rng() % 30, -0.2, 0.6, rng);
    for (std::size_t k = 0; k < std::min(s.rows(), s.cols()); k += 1 + rng() % 2) s(k, k) = 0.9;
    auto p = params_for(GetParam(), 0.5, 1 + static_cast<int>(rng() % 3), 1);
    const auto candidates = align_candidates(s, p);
    for (int len = 1; len <= 6; ++len) {
      p.min_length = len;
      const auto want = align(s, p);
      const auto got = finalize_candidates(candidates, len);
      ASSERT_EQ(got.size(), want.size()) << "trial " << trial << " len " << len;
      for (std::size_t k = 0; k < got.size(); ++k) {
        EXPECT_EQ(got[k].segment, want[k].segment);
        EXPECT_DOUBLE_EQ(got[k].score, want[k].score);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Align, EveryMethod, ::testing::ValuesIn(kAllAlignMethods),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(AlignParams, JsonRoundTripAndValidation) {
  AlignParams p = params_for(AlignMethod::kDtw, 0.42, 3, 4);
  p.band_radius = 7;
  EXPECT_EQ(parse_align_params(serialize_align_params(p)), p);
  EXPECT_THROW(parse_align_params(R"({"min_length": 0})"), Error);
  EXPECT_THROW(parse_align_params(R"({"sim_threshold": 1.5})"), Error);
  EXPECT_THROW(parse_align_params(R"({"method": "spd"})"), Error);
  EXPECT_EQ(parse_align_method("TN"), AlignMethod::kTemporalNetwork);
}

TEST(ResolveOverlaps, KeepsHigherScore) {
  std::vector<ScoredSegment> in{{{0, 5, 0, 5}, 1.0}, {{3, 8, 3, 8}, 2.0}, {{3, 8, 20, 25}, 0.5}};
  const auto out = resolve_overlaps(in);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].score, 2.0);
  EXPECT_EQ(out[1].score, 0.5);
}

// ---------------------------------------------------------------------------
// Hough voting against a scan over every offset.

std::vector<ScoredSegment> offset_scan_oracle(const SimilarityMatrix& s, const AlignParams& p) {
  const int n = static_cast<int>(s.rows());
  const int m = static_cast<int>(s.cols());
  std::vector<ScoredSegment> out;
  for (int delta = -(m - 1); delta <= n - 1; ++delta) {
    std::vector<int> qs;
    for (int q = 0; q < m; ++q) {
      const int r = q + delta;
      if (r >= 0 && r < n && s(r, q) >= p.sim_threshold) qs.push_back(q);
    }
    if (static_cast<int>(qs.size()) < p.min_length) continue;
    std::size_t b = 0;
    while (b < qs.size()) {
      std::size_t e = b + 1;
      while (e < qs.size() && qs[e] - qs[e - 1] - 1 <= p.max_gap) ++e;
      double score = 0.0;
      for (std::size_t k = b; k < e; ++k) score += s(qs[k] + delta, qs[k]);
      const int len = qs[e - 1] + 1 - qs[b];
      if (len >= p.min_length) out.push_back({{qs[b], qs[e - 1] + 1, qs[b] + delta, qs[e - 1] + 1 + delta}, score});
      b = e;
    }
  }
  return resolve_overlaps(out);
}

TEST(HoughVoting, SingleOffset) {
  SimilarityMatrix s(20, 10, 0.0);
  for (int q = 0; q < 10; ++q) s(q + 3, q) = 1.0;
  const auto out = hough_voting(s, params_for(AlignMethod::kHoughVoting));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].segment, (CopySegmentPair{0, 10, 3, 13}));
}

TEST(HoughVoting, TwoPlantedOffsetsMatchOffsetScan) {
  std::mt19937_64 rng(31);
  auto s = testing::random_matrix(30, 20, 0.0, 0.1, rng);
  for (int q = 0; q < 8; ++q) s(q, q) = 0.9 + 0.1 * testing::random_matrix(1, 1, 0, 1, rng)(0, 0);
  for (int q = 10; q < 16; ++q) s(q + 5, q) = 0.95;
  const auto p = params_for(AlignMethod::kHoughVoting);
  const auto out = hough_voting(s, p);
  EXPECT_EQ(out, offset_scan_oracle(s, p));
  ASSERT_EQ(out.size(), 2u);
  const CopySegmentPair plant_a{0, 8, 0, 8};
  const CopySegmentPair plant_b{10, 16, 15, 21};
  EXPECT_TRUE(std::any_of(out.begin(), out.end(), [&](auto& d) { return overlaps(d.segment, plant_a); }));
  EXPECT_TRUE(std::any_of(out.begin(), out.end(), [&](auto& d) { return overlaps(d.segment, plant_b); }));
}

TEST(HoughVoting, MatchesOffsetScanOnRandomSparseMatrices) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = testing::random_matrix(1 + rng() % 20, 1 + rng() % 20, 0.0, 1.0, rng);
    const auto p = params_for(AlignMethod::kHoughVoting, 0.6 + 0.05 * static_cast<double>(rng() % 6),
                              1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3));
    const auto got = hough_voting(s, p);
    const auto want = offset_scan_oracle(s, p);
    ASSERT_EQ(got.size(), want.size()) << "trial " << trial;
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_EQ(got[k].segment, want[k].segment);
      EXPECT_NEAR(got[k].score, want[k].score, 1e-9);
    }
  }
}

TEST(HoughVoting, WideBinsMergeNearbyOffsets) {
  SimilarityMatrix s(20, 10, 0.0);
  for (int q = 0; q < 5; ++q) s(q + 3, q) = 1.0;
  for (int q = 5; q < 10; ++q) s(q + 4, q) = 1.0;
  auto p = params_for(AlignMethod::kHoughVoting);
  EXPECT_EQ(hough_voting(s, p).size(), 2u);
  p.offset_bin_width = 2;  // bins are anchored at offset -9, so 3 and 4 share one
  const auto out = hough_voting(s, p);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].segment, (CopySegmentPair{0, 10, 3, 14}));
}

// ---------------------------------------------------------------------------
// Temporal network against an exhaustive longest path over the match DAG.

double dag_longest_path(const SimilarityMatrix& s, const AlignParams& p,
                        const std::set<std::pair<std::size_t, std::size_t>>& removed = {}) {
  std::vector<Cell> nodes;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = 0; j < s.cols(); ++j) {
      if (s(i, j) >= p.sim_threshold && !removed.contains({i, j})) nodes.push_back({i, j});
    }
  }
  std::map<std::size_t, double> memo;
  std::function<double(std::size_t)> best_from = [&](std::size_t u) -> double {
    if (auto it = memo.find(u); it != memo.end()) return it->second;
    double tail = 0.0;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      const auto di = static_cast<long>(nodes[v].ref) - static_cast<long>(nodes[u].ref);
      const auto dj = static_cast<long>(nodes[v].query) - static_cast<long>(nodes[u].query);
      if (di >= 1 && dj >= 1 && di - 1 <= p.max_gap && dj - 1 <= p.max_gap) {
        tail = std::max(tail, best_from(v));
      }
    }
    return memo[u] = s(nodes[u].ref, nodes[u].query) + tail;
  };
  double best = 0.0;
  for (std::size_t u = 0; u < nodes.size(); ++u) best = std::max(best, best_from(u));
  return best;
}

TEST(TemporalNetwork, BridgesTwoFrameGap) {
  SimilarityMatrix s(12, 12, 0.1);
  for (int k = 0; k < 12; ++k) {
    if (k != 5 && k != 6) s(k, k) = 0.9;
  }
  const auto p = params_for(AlignMethod::kTemporalNetwork, 0.5, 3, 2);
  const auto out = temporal_network(s, p);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].segment, (CopySegmentPair{0, 12, 0, 12}));
  EXPECT_NEAR(out[0].score, dag_longest_path(s, p), 1e-12);
  EXPECT_NEAR(out[0].score, 0.9 * 10, 1e-12);
}

TEST(TemporalNetwork, GapTooWideSplits) {
  SimilarityMatrix s(12, 12, 0.1);
  for (int k = 0; k < 12; ++k) {
    if (k < 4 || k > 7) s(k, k) = 0.9;
  }
  const auto out = temporal_network(s, params_for(AlignMethod::kTemporalNetwork, 0.5, 3, 2));
  EXPECT_EQ(out.size(), 2u);
}

TEST(TemporalNetwork, FirstChainIsExactLongestPath) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = testing::random_matrix(1 + rng() % 14, 1 + rng() % 14, 0.0, 1.0, rng);
    const auto p = params_for(AlignMethod::kTemporalNetwork, 0.3 + 0.05 * static_cast<double>(rng() % 8),
                              1 + static_cast<int>(rng() % 3), 1);
    const auto chains = temporal_network_chains(s, p);
    const double want = dag_longest_path(s, p);
    if (want < p.min_length) {
      EXPECT_TRUE(chains.empty());
      continue;
    }
    ASSERT_FALSE(chains.empty());
    EXPECT_NEAR(chains[0].weight, want, 1e-9) << "trial " << trial;
  }
}

TEST(TemporalNetwork, ChainsAreValidAndDescending) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::random_matrix(5 + rng() % 30, 5 + rng() % 30, -0.5, 1.0, rng);
    const auto p = params_for(AlignMethod::kTemporalNetwork, 0.5, 1 + static_cast<int>(rng() % 3), 1);
    const auto chains = temporal_network_chains(s, p);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      if (c > 0) EXPECT_GE(chains[c - 1].weight, chains[c].weight - 1e-12);
      double w = 0.0;
      for (std::size_t k = 0; k < chains[c].cells.size(); ++k) {
        const auto& cell = chains[c].cells[k];
        EXPECT_GE(s(cell.ref, cell.query), p.sim_threshold);
        EXPECT_TRUE(seen.insert({cell.ref, cell.query}).second);
        w += s(cell.ref, cell.query);
        if (k > 0) {
          const auto& prev = chains[c].cells[k - 1];
          EXPECT_GT(cell.ref, prev.ref);
          EXPECT_GT(cell.query, prev.query);
          EXPECT_LE(cell.ref - prev.ref - 1, static_cast<std::size_t>(p.max_gap));
          EXPECT_LE(cell.query - prev.query - 1, static_cast<std::size_t>(p.max_gap));
        }
      }
      EXPECT_NEAR(w, chains[c].weight, 1e-9);
    }
  }
}

TEST(TemporalNetwork, EveryChainIsLongestPathOfRemainingNodes) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 150; ++trial) {
    const auto s = testing::random_matrix(3 + rng() % 16, 3 + rng() % 16, 0.0, 1.0, rng);
    const auto p = params_for(AlignMethod::kTemporalNetwork, 0.3 + 0.05 * static_cast<double>(rng() % 6),
                              1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2));
    std::set<std::pair<std::size_t, std::size_t>> removed;
    for (const auto& chain : temporal_network_chains(s, p)) {
      EXPECT_NEAR(chain.weight, dag_longest_path(s, p, removed), 1e-9) << "trial " << trial;
      for (const auto& c : chain.cells) removed.insert({c.ref, c.query});
    }
    EXPECT_LT(dag_longest_path(s, p, removed), p.min_length) << "trial " << trial;
  }
}

TEST(TemporalNetwork, RaisingThresholdNeverAddsChainCells) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testing::random_matrix(5 + rng() % 20, 5 + rng() % 20, 0.0, 1.0, rng);
    const int gap = 1 + static_cast<int>(rng() % 3);
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (double thr = 0.3; thr <= 0.95; thr += 0.05) {
      std::size_t cells = 0;
      for (const auto& c : temporal_network_chains(s, params_for(AlignMethod::kTemporalNetwork, thr, gap, 1))) {
        cells += c.cells.size();
      }
      EXPECT_LE(cells, previous) << "trial " << trial << " thr " << thr;
      previous = cells;
    }
  }
}

// ---------------------------------------------------------------------------
// Dynamic programming against an independent local-alignment table.

std::vector<double> local_alignment_oracle(const SimilarityMatrix& s, double thr, double pen) {
  const std::size_t n = s.rows();
  const std::size_t m = s.cols();
  std::vector<std::vector<double>> h(n + 1, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      // Border cells have no predecessor in that direction.
      double best = (i > 1 && j > 1) ? h[i - 1][j - 1] : 0.0;
      if (i > 1) best = std::max(best, h[i - 1][j] - pen);
      if (j > 1) best = std::max(best, h[i][j - 1] - pen);
      h[i][j] = std::max(0.0, std::max(0.0, best) + s(i - 1, j - 1) - thr);
    }
  }
  std::vector<double> out;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) out.push_back(h[i][j]);
  }
  return out;
}

TEST(DynamicProgramming, PlantedBlockRecovered) {
  std::mt19937_64 rng(51);
  auto s = testing::random_matrix(15, 15, 0.0, 0.05, rng);
  for (int k = 0; k < 7; ++k) s(4 + k, 2 + k) = 0.9;
  auto p = params_for(AlignMethod::kDynamicProgramming);
  p.diag_penalty = 0.5;
  const auto out = dynamic_programming(s, p);
  ASSERT_EQ(out.size(), 1u);
  const auto& g = out[0].segment;
  EXPECT_LE(std::abs(g.query_start - 2), 1);
  EXPECT_LE(std::abs(g.query_end - 9), 1);
  EXPECT_LE(std::abs(g.ref_start - 4), 1);
  EXPECT_LE(std::abs(g.ref_end - 11), 1);
  const auto oracle = local_alignment_oracle(s, p.sim_threshold, p.diag_penalty);
  EXPECT_NEAR(out[0].score, *std::max_element(oracle.begin(), oracle.end()), 1e-12);
}

TEST(DynamicProgramming, ScoreTableMatchesOracle) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testing::random_matrix(1 + rng() % 20, 1 + rng() % 20, -1.0, 1.0, rng);
    auto p = params_for(AlignMethod::kDynamicProgramming, 0.1 * static_cast<double>(rng() % 8));
    p.diag_penalty = 0.25 * static_cast<double>(rng() % 4);
    const auto got = dp_score_matrix(s, p);
    const auto want = local_alignment_oracle(s, p.sim_threshold, p.diag_penalty);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-12);
  }
}

TEST(DynamicProgramming, TwoSeparatedRuns) {
  SimilarityMatrix s(30, 30, 0.0);
  for (int k = 0; k < 6; ++k) s(k, k) = 1.0;
  for (int k = 0; k < 8; ++k) s(15 + k, 20 + k) = 1.0;
  const auto out = dynamic_programming(s, params_for(AlignMethod::kDynamicProgramming));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].segment, (CopySegmentPair{20, 28, 15, 23}));
  EXPECT_EQ(out[1].segment, (CopySegmentPair{0, 6, 0, 6}));
}

// ---------------------------------------------------------------------------
// DTW against the textbook cumulative-cost recurrence. Unbanded paths are
// open on the reference axis, i.e. subsequence DTW of the query.

double dtw_oracle(const SimilarityMatrix& s, bool open_ends) {
  const std::size_t n = s.rows();
  const std::size_t m = s.cols();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n + 1, std::vector<double>(m + 1, inf));
  for (std::size_t i = 0; i <= (open_ends ? n : 0); ++i) d[i][0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      d[i][j] = (1.0 - s(i - 1, j - 1)) + std::min({d[i - 1][j - 1], d[i - 1][j], d[i][j - 1]});
    }
  }
  if (!open_ends) return d[n][m];
  double best = inf;
  for (std::size_t i = 1; i <= n; ++i) best = std::min(best, d[i][m]);
  return best;
}

void expect_valid_path(const WarpingPath& path, const SimilarityMatrix& s, bool open_ends) {
  ASSERT_FALSE(path.cells.empty());
  EXPECT_EQ(path.cells.front().query, 0u);
  EXPECT_EQ(path.cells.back().query, s.cols() - 1);
  if (!open_ends) {
    EXPECT_EQ(path.cells.front().ref, 0u);
    EXPECT_EQ(path.cells.back().ref, s.rows() - 1);
  }
  double cost = 0.0;
  for (std::size_t k = 0; k < path.cells.size(); ++k) {
    cost += 1.0 - s(path.cells[k].ref, path.cells[k].query);
    if (k > 0) {
      const auto di = path.cells[k].ref - path.cells[k - 1].ref;
      const auto dj = path.cells[k].query - path.cells[k - 1].query;
      EXPECT_TRUE((di == 1 && dj == 1) || (di == 1 && dj == 0) || (di == 0 && dj == 1));
    }
  }
  EXPECT_NEAR(cost, path.total_cost, 1e-9);
}

TEST(Dtw, HalfDensityQueryMatchesTextbookCost) {
  std::mt19937_64 rng(61);
  auto s = testing::random_matrix(10, 20, 0.0, 0.2, rng);
  for (std::size_t j = 0; j < 20; ++j) s(j / 2, j) = 0.95;  // each reference frame shown twice
  const auto path = dtw_warping_path(s, std::nullopt);
  ASSERT_TRUE(path);
  expect_valid_path(*path, s, true);
  EXPECT_NEAR(path->total_cost, dtw_oracle(s, true), 1e-12);
  EXPECT_NEAR(path->total_cost, 20 * 0.05, 1e-12);
  const auto out = dtw_align(s, params_for(AlignMethod::kDtw));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].segment, (CopySegmentPair{0, 20, 0, 10}));
}

TEST(Dtw, RandomMatricesMatchTextbookCost) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testing::random_matrix(1 + rng() % 25, 1 + rng() % 25, -1.0, 1.0, rng);
    const auto open = dtw_warping_path(s, std::nullopt);
    ASSERT_TRUE(open);
    expect_valid_path(*open, s, true);
    EXPECT_NEAR(open->total_cost, dtw_oracle(s, true), 1e-9);
    const auto global = dtw_warping_path(s, static_cast<int>(s.rows() + s.cols()));
    ASSERT_TRUE(global);
    expect_valid_path(*global, s, false);
    EXPECT_NEAR(global->total_cost, dtw_oracle(s, false), 1e-9);
  }
}

TEST(Dtw, BandConstrainsPath) {
  std::mt19937_64 rng(63);
  const auto s = testing::random_matrix(30, 12, -1.0, 1.0, rng);
  const auto banded = dtw_warping_path(s, 2);
  ASSERT_TRUE(banded);
  expect_valid_path(*banded, s, false);
  EXPECT_GE(banded->total_cost, dtw_oracle(s, false) - 1e-12);
  for (const auto& c : banded->cells) {
    const double u = static_cast<double>(c.ref);
    const double v = static_cast<double>(c.query) * 29.0 / 11.0;
    EXPECT_LE(std::abs(u - v), 2.0 + 1e-9);
  }
}

TEST(Dtw, GapBridgingUsesMaxGap) {
  SimilarityMatrix s(12, 12, 0.0);
  for (int k = 0; k < 12; ++k) {
    if (k != 5 && k != 6) s(k, k) = 1.0;
  }
  EXPECT_EQ(dtw_align(s, params_for(AlignMethod::kDtw, 0.5, 2, 2)).size(), 1u);
  EXPECT_EQ(dtw_align(s, params_for(AlignMethod::kDtw, 0.5, 1, 2)).size(), 2u);
}

}  // namespace
}  // namespace vcd
