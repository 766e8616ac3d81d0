#include <algorithm>
#include <limits>

#include "align_internal.hpp"


namespace vcd {

namespace {

struct Match {
  std::int32_t query;
  std::int32_t ref;
  double sim;
};

}  // namespace

namespace detail {

std::vector<AlignCandidate> hough_candidates(const SimilarityMatrix& s, const AlignParams& p) {
  require_method(p, AlignMethod::kHoughVoting, "hough_voting");
  const auto n = static_cast<std::int32_t>(s.rows());
  const auto m = static_cast<std::int32_t>(s.cols());
  if (n == 0 || m == 0) return {};

  // Offsets ref - query span [-(m - 1), n - 1]; bins are anchored at the
  // smallest offset.
  const std::int32_t width = p.offset_bin_width;
  const std::int32_t num_bins = (n + m - 1 + width - 1) / width;
  std::vector<std::vector<Match>> bins(static_cast<std::size_t>(num_bins));
  for (std::int32_t r = 0; r < n; ++r) {
    const auto row = s.row(static_cast<std::size_t>(r));
    for (std::int32_t q = 0; q < m; ++q) {
      const double v = row[static_cast<std::size_t>(q)];
      if (v >= p.sim_threshold) {
        const auto bin = (r - q + m - 1) / width;
        bins[static_cast<std::size_t>(bin)].push_back({q, r, v});
      }
    }
  }

  std::vector<AlignCandidate> segments;
  for (auto& votes : bins) {
    if (static_cast<std::int64_t>(votes.size()) < p.min_length) continue;
    std::sort(votes.begin(), votes.end(), [](const Match& a, const Match& b) {
      return a.query != b.query ? a.query < b.query : a.ref < b.ref;
    });
    std::size_t begin = 0;
    while (begin < votes.size()) {
      std::size_t end = begin + 1;
      while (end < votes.size() && votes[end].query - votes[end - 1].query - 1 <= p.max_gap) {
        ++end;
      }
      CopySegmentPair seg{votes[begin].query, votes[end - 1].query + 1,
                          std::numeric_limits<std::int32_t>::max(), 0};
      double score = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        seg.ref_start = std::min(seg.ref_start, votes[k].ref);
        seg.ref_end = std::max(seg.ref_end, votes[k].ref + 1);
        score += votes[k].sim;
      }
      segments.push_back({{seg, score}, static_cast<double>(votes.size())});
      begin = end;
    }
  }
  return segments;
}

}  // namespace detail
}  // namespace vcd
