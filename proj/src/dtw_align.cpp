#include <algorithm>
#include <cmath>
#include <limits>

#include "align_internal.hpp"

namespace vcd {

namespace {

// Sakoe-Chiba band around the corner-to-corner diagonal, measured along the
// longer axis so that rectangular matrices get a band of the stated radius.
bool in_band(std::size_t i, std::size_t j, std::size_t n, std::size_t m,
             std::optional<int> radius) {
  if (!radius || n == 1 || m == 1) return true;
  const double span = static_cast<double>(std::max(n, m) - 1);
  const double u = static_cast<double>(i) * span / static_cast<double>(n - 1);
  const double v = static_cast<double>(j) * span / static_cast<double>(m - 1);
  return std::abs(u - v) <= static_cast<double>(*radius) + 1e-9;
}

}  // namespace

std::optional<WarpingPath> dtw_warping_path(const SimilarityMatrix& s,
                                            std::optional<int> band_radius) {
  const std::size_t n = s.rows();
  const std::size_t m = s.cols();
  if (n == 0 || m == 0) return std::nullopt;
  // Without a band the path may enter at any reference row of the first
  // query column and leave at any row of the last one.
  const bool open_ends = !band_radius;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> acc(n * m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!in_band(i, j, n, m, band_radius)) continue;
      const double cost = 1.0 - s(i, j);
      if (j == 0 && (i == 0 || open_ends)) {
        acc[i * m] = cost;
        continue;
      }
      double prev = kInf;
      if (i > 0 && j > 0) prev = acc[(i - 1) * m + j - 1];
      if (i > 0) prev = std::min(prev, acc[(i - 1) * m + j]);
      if (j > 0) prev = std::min(prev, acc[i * m + j - 1]);
      if (prev < kInf) acc[i * m + j] = prev + cost;
    }
  }
  std::size_t i = n - 1;
  if (open_ends) {
    for (std::size_t r = 0; r < n; ++r) {
      if (acc[r * m + m - 1] < acc[i * m + m - 1] || (r < i && acc[r * m + m - 1] == acc[i * m + m - 1])) {
        i = r;
      }
    }
  }
  std::size_t j = m - 1;
  if (!std::isfinite(acc[i * m + j])) return std::nullopt;

  WarpingPath path;
  path.total_cost = acc[i * m + j];
  path.cells.push_back({i, j});
  while (j > 0 || (i > 0 && !open_ends)) {
    // Prefer the diagonal, then the reference-axis step, on ties.
    double best = kInf;
    std::size_t bi = i;
    std::size_t bj = j;
    if (i > 0 && j > 0 && acc[(i - 1) * m + j - 1] < best) {
      best = acc[(i - 1) * m + j - 1];
      bi = i - 1;
      bj = j - 1;
    }
    if (i > 0 && acc[(i - 1) * m + j] < best) {
      best = acc[(i - 1) * m + j];
      bi = i - 1;
      bj = j;
    }
    if (j > 0 && acc[i * m + j - 1] < best) {
      best = acc[i * m + j - 1];
      bi = i;
      bj = j - 1;
    }
    i = bi;
    j = bj;
    path.cells.push_back({i, j});
  }
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

namespace detail {

std::vector<AlignCandidate> dtw_candidates(const SimilarityMatrix& s, const AlignParams& p) {
  require_method(p, AlignMethod::kDtw, "dtw_align");
  const auto path = dtw_warping_path(s, p.band_radius);
  if (!path) return {};

  std::vector<AlignCandidate> segments;
  const auto& cells = path->cells;
  auto emit = [&](std::size_t begin, std::size_t end) {
    double total = 0.0;
    for (std::size_t k = begin; k < end; ++k) total += s(cells[k].ref, cells[k].query);
    const double mean = total / static_cast<double>(end - begin);
    CopySegmentPair seg{static_cast<std::int32_t>(cells[begin].query),
                        static_cast<std::int32_t>(cells[end - 1].query + 1),
                        static_cast<std::int32_t>(cells[begin].ref),
                        static_cast<std::int32_t>(cells[end - 1].ref + 1)};
    if (mean >= p.sim_threshold) segments.push_back({{seg, total}});
  };

  // Runs of matching path cells, bridged across at most max_gap
  // non-matching cells; the run always starts and ends on a match.
  std::size_t k = 0;
  while (k < cells.size()) {
    if (s(cells[k].ref, cells[k].query) < p.sim_threshold) {
      ++k;
      continue;
    }
    const std::size_t begin = k;
    std::size_t last_match = k;
    for (++k; k < cells.size(); ++k) {
      if (s(cells[k].ref, cells[k].query) >= p.sim_threshold) {
        last_match = k;
      } else if (k - last_match > static_cast<std::size_t>(p.max_gap)) {
        break;
      }
    }
    emit(begin, last_match + 1);
    k = last_match + 1;
  }
  return segments;
}

}  // namespace detail
}  // namespace vcd
