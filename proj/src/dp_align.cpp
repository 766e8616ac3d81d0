#include <algorithm>
#include <numeric>

#include "align_internal.hpp"

namespace vcd {

namespace {

constexpr std::int64_t kFresh = -1;

struct DpTable {
  std::vector<double> score;
  std::vector<std::int64_t> pred;  // kFresh where the run starts
};

// score(i, j) = max(0, max{diag, up - penalty, left - penalty} + s(i, j) - t).
// Ties prefer the diagonal, then the reference-axis move.
DpTable fill(const SimilarityMatrix& s, const AlignParams& p) {
  const std::size_t n = s.rows();
  const std::size_t m = s.cols();
  DpTable t{std::vector<double>(n * m, 0.0), std::vector<std::int64_t>(n * m, kFresh)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t at = i * m + j;
      double carry = 0.0;
      std::int64_t from = kFresh;
      if (i > 0 && j > 0) {
        carry = t.score[at - m - 1];
        from = static_cast<std::int64_t>(at - m - 1);
      }
      if (i > 0 && t.score[at - m] - p.diag_penalty > carry) {
        carry = t.score[at - m] - p.diag_penalty;
        from = static_cast<std::int64_t>(at - m);
      }
      if (j > 0 && t.score[at - 1] - p.diag_penalty > carry) {
        carry = t.score[at - 1] - p.diag_penalty;
        from = static_cast<std::int64_t>(at - 1);
      }
      if (carry <= 0.0) {
        carry = 0.0;
        from = kFresh;
      }
      const double v = carry + s(i, j) - p.sim_threshold;
      if (v > 0.0) {
        t.score[at] = v;
        t.pred[at] = from;
      }
    }
  }
  return t;
}

}  // namespace

std::vector<double> dp_score_matrix(const SimilarityMatrix& s, const AlignParams& p) {
  validate(p);
  return fill(s, p).score;
}

namespace detail {

std::vector<AlignCandidate> dp_candidates(const SimilarityMatrix& s, const AlignParams& p) {
  require_method(p, AlignMethod::kDynamicProgramming, "dynamic_programming");
  const std::size_t m = s.cols();
  const DpTable t = fill(s, p);
  const auto values = s.values();

  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < t.score.size(); ++k) {
    if (t.score[k] > 0.0) order.push_back(k);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return t.score[a] > t.score[b];
  });

  // Peaks are taken in descending score order. A trace that runs into cells
  // already claimed by a stronger run keeps only what it adds on top of the
  // junction; traces that add nothing are the decaying tails of earlier runs.
  std::vector<std::uint8_t> claimed(t.score.size(), 0);
  std::vector<std::size_t> trace;
  std::vector<AlignCandidate> segments;
  for (const std::size_t peak : order) {
    if (claimed[peak]) continue;
    trace.clear();
    std::int64_t at = static_cast<std::int64_t>(peak);
    double base = 0.0;
    while (at != kFresh) {
      const auto u = static_cast<std::size_t>(at);
      if (claimed[u]) {
        base = t.score[u];
        break;
      }
      trace.push_back(u);
      claimed[u] = 1;
      at = t.pred[u];
    }
    const double gain = t.score[peak] - base;
    if (gain <= 0.0) continue;
    // Drop the below-threshold connector cells nearest the junction.
    while (!trace.empty() && values[trace.back()] < p.sim_threshold) trace.pop_back();
    if (trace.empty()) continue;

    const std::size_t first = trace.back();
    CopySegmentPair seg{static_cast<std::int32_t>(first % m),
                        static_cast<std::int32_t>(peak % m + 1),
                        static_cast<std::int32_t>(first / m),
                        static_cast<std::int32_t>(peak / m + 1)};
    segments.push_back({{seg, gain}});
  }
  return segments;
}

}  // namespace detail
}  // namespace vcd
