#pragma once

#include <vector>

#include "vcd/align.hpp"

namespace vcd::detail {

std::vector<AlignCandidate> hough_candidates(const SimilarityMatrix& s, const AlignParams& p);
std::vector<AlignCandidate> tn_candidates(const SimilarityMatrix& s, const AlignParams& p);
std::vector<AlignCandidate> dp_candidates(const SimilarityMatrix& s, const AlignParams& p);
std::vector<AlignCandidate> dtw_candidates(const SimilarityMatrix& s, const AlignParams& p);

void require_method(const AlignParams& p, AlignMethod method, const char* caller);

}  // namespace vcd::detail
