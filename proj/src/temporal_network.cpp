#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

#include "align_internal.hpp"

namespace vcd {

std::vector<TnChain> temporal_network_chains(const SimilarityMatrix& s, const AlignParams& p) {
  detail::require_method(p, AlignMethod::kTemporalNetwork, "temporal_network");
  const std::size_t n = s.rows();
  const std::size_t m = s.cols();
  const auto values = s.values();
  const std::size_t step = static_cast<std::size_t>(p.max_gap) + 1;
  constexpr std::int64_t kNone = -1;

  std::vector<std::uint8_t> alive(n * m);
  std::size_t alive_count = 0;
  for (std::size_t k = 0; k < n * m; ++k) {
    alive[k] = values[k] >= p.sim_threshold ? 1 : 0;
    alive_count += alive[k];
  }
  std::vector<TnChain> chains;
  if (alive_count == 0) return chains;

  std::vector<double> best(n * m, 0.0);
  std::vector<std::int64_t> pred(n * m, kNone);
  std::vector<std::uint32_t> version(n * m, 0);
  // Epoch in which a node was last removed or had its weight lowered.
  std::vector<std::uint32_t> touched(n * m, 0);

  // Max-heap on weight with the lowest row-major index first among ties,
  // which is the order a plain first-maximum scan would pick.
  using Entry = std::tuple<double, std::size_t, std::uint32_t>;
  auto after = [](const Entry& a, const Entry& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) > std::get<1>(b);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(after)> heap(after);

  // Longest weighted path ending at a node; ties go to the nearest predecessor.
  auto evaluate = [&](std::size_t i, std::size_t j) {
    const std::size_t ilo = i >= step ? i - step : 0;
    const std::size_t jlo = j >= step ? j - step : 0;
    double carry = 0.0;
    std::int64_t from = kNone;
    for (std::size_t pi = i; pi-- > ilo;) {
      for (std::size_t pj = j; pj-- > jlo;) {
        const std::size_t q = pi * m + pj;
        if (alive[q] && best[q] > carry) {
          carry = best[q];
          from = static_cast<std::int64_t>(q);
        }
      }
    }
    return std::pair{values[i * m + j] + carry, from};
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t at = i * m + j;
      if (!alive[at]) continue;
      std::tie(best[at], pred[at]) = evaluate(i, j);
      heap.emplace(best[at], at, 0);
    }
  }

  std::uint32_t epoch = 0;
  while (!heap.empty()) {
    const auto [top_weight, top, ver] = heap.top();
    heap.pop();
    if (!alive[top] || ver != version[top]) continue;
    if (top_weight < static_cast<double>(p.min_length)) break;

    ++epoch;
    TnChain chain;
    chain.weight = top_weight;
    for (std::int64_t at = static_cast<std::int64_t>(top); at != kNone;
         at = pred[static_cast<std::size_t>(at)]) {
      const auto u = static_cast<std::size_t>(at);
      chain.cells.push_back({u / m, u % m});
      alive[u] = 0;
      touched[u] = epoch;
    }
    std::reverse(chain.cells.begin(), chain.cells.end());
    const Cell first = chain.cells.front();
    std::size_t last_change_row = chain.cells.back().ref;
    chains.push_back(std::move(chain));

    // Only nodes whose chosen predecessor was removed or lowered can change;
    // weights never rise, so a node keeping its predecessor keeps its weight.
    for (std::size_t i = first.ref; i < n && i <= last_change_row + step; ++i) {
      for (std::size_t j = first.query; j < m; ++j) {
        const std::size_t at = i * m + j;
        if (!alive[at] || pred[at] == kNone) continue;
        if (touched[static_cast<std::size_t>(pred[at])] != epoch) continue;
        const auto [weight, from] = evaluate(i, j);
        pred[at] = from;
        if (weight != best[at]) {
          best[at] = weight;
          touched[at] = epoch;
          heap.emplace(weight, at, ++version[at]);
          last_change_row = std::max(last_change_row, i);
        }
      }
    }
  }
  return chains;
}

namespace detail {

std::vector<AlignCandidate> tn_candidates(const SimilarityMatrix& s, const AlignParams& p) {
  std::vector<AlignCandidate> out;
  for (const auto& chain : temporal_network_chains(s, p)) {
    const Cell& a = chain.cells.front();
    const Cell& b = chain.cells.back();
    CopySegmentPair seg{static_cast<std::int32_t>(a.query),
                        static_cast<std::int32_t>(b.query + 1),
                        static_cast<std::int32_t>(a.ref),
                        static_cast<std::int32_t>(b.ref + 1)};
    out.push_back({{seg, chain.weight}, chain.weight});
  }
  return out;
}

}  // namespace detail
}  // namespace vcd
