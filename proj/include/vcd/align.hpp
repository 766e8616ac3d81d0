#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vcd/core.hpp"
#include "vcd/simmatrix.hpp"

namespace vcd {

enum class AlignMethod { kHoughVoting, kTemporalNetwork, kDynamicProgramming, kDtw };

inline constexpr AlignMethod kAllAlignMethods[] = {
    AlignMethod::kHoughVoting, AlignMethod::kTemporalNetwork,
    AlignMethod::kDynamicProgramming, AlignMethod::kDtw};

/// "hv", "tn", "dp" or "dtw".
std::string_view to_string(AlignMethod method);
AlignMethod parse_align_method(std::string_view name);

// Gaps count skipped frames: consecutive matches at indices k and k + 1 have
// gap 0, so max_gap = 1 tolerates a single dropped second.
struct AlignParams {
  AlignMethod method = AlignMethod::kTemporalNetwork;
  double sim_threshold = 0.5;        // cells with s >= threshold are matches
  int max_gap = 2;
  int min_length = 2;                // seconds, on both axes
  int offset_bin_width = 1;          // HV only
  double diag_penalty = 0.5;         // DP only
  std::optional<int> band_radius;    // DTW only; nullopt = unbounded

  friend bool operator==(const AlignParams&, const AlignParams&) = default;
};

/// Throws kConfig when a field is outside its legal range.
void validate(const AlignParams& p);

std::string serialize_align_params(const AlignParams& p);
AlignParams parse_align_params(std::string_view json_text);

std::vector<ScoredSegment> hough_voting(const SimilarityMatrix& s, const AlignParams& p);
std::vector<ScoredSegment> temporal_network(const SimilarityMatrix& s, const AlignParams& p);
std::vector<ScoredSegment> dynamic_programming(const SimilarityMatrix& s, const AlignParams& p);
std::vector<ScoredSegment> dtw_align(const SimilarityMatrix& s, const AlignParams& p);

/// Dispatches on p.method.
std::vector<ScoredSegment> align(const SimilarityMatrix& s, const AlignParams& p);

/// A segment before the min_length filter and overlap resolution. It survives
/// a given min_length L iff gate >= L and both of its spans are >= L (HV
/// gates on the offset bin's vote count, TN on the chain weight).
struct AlignCandidate {
  ScoredSegment segment;
  double gate = std::numeric_limits<double>::infinity();
};

/// Candidates valid for every min_length >= p.min_length: for any such L,
/// finalize_candidates(align_candidates(s, p), L) equals align(s, p') where
/// p' is p with min_length L. Grid search uses this to share work.
std::vector<AlignCandidate> align_candidates(const SimilarityMatrix& s, const AlignParams& p);
std::vector<ScoredSegment> finalize_candidates(std::span<const AlignCandidate> candidates,
                                               int min_length);

/// Among segments overlapping on both axes only the highest-scoring one
/// survives. Output is ordered by descending score, ties by segment bounds.
std::vector<ScoredSegment> resolve_overlaps(std::vector<ScoredSegment> segments);

// Lower-level views used by the oracle tests and diagnostics.

struct Cell {
  std::size_t ref = 0;
  std::size_t query = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct TnChain {
  std::vector<Cell> cells;  // strictly increasing on both axes
  double weight = 0.0;      // sum of node similarities
};

/// The greedy longest-path extraction, before overlap resolution, in
/// extraction (descending weight) order.
std::vector<TnChain> temporal_network_chains(const SimilarityMatrix& s, const AlignParams& p);

/// Local-alignment score for every cell, row-major (rows = reference).
std::vector<double> dp_score_matrix(const SimilarityMatrix& s, const AlignParams& p);

struct WarpingPath {
  std::vector<Cell> cells;  // query frame 0 to M - 1, monotone
  double total_cost = 0.0;  // sum of 1 - s over path cells
};

/// DTW over cost 1 - s covering every query frame. Unbanded, the path may
/// start and end on any reference frame; a band implies a corner-to-corner
/// path inside it. Empty when the band admits no path.
std::optional<WarpingPath> dtw_warping_path(const SimilarityMatrix& s,
                                            std::optional<int> band_radius);

}  // namespace vcd
