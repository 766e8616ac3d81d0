#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vcd/core.hpp"
#include "vcd/metrics.hpp"

namespace vcd {

/// All n(n-1)/2 unordered index pairs (a < b), in lexicographic order.
/// Throws kValidation on duplicate ids.
std::vector<std::pair<std::size_t, std::size_t>> enumerate_pairs(std::span<const std::string> ids);

constexpr std::size_t unordered_pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Frame-to-frame: the largest cosine over all frame pairs.
double f2f_score(const FrameFeatureSequence& a, const FrameFeatureSequence& b);

/// Global-to-global: cosine of the re-normalized frame means.
double g2g_score(const FrameFeatureSequence& a, const FrameFeatureSequence& b);

/// Sub-mean-to-global: the reference is cut into consecutive `window`-second
/// chunks (last partial chunk kept); the best cosine between a chunk mean and
/// the query's global mean. Directional in its arguments.
double sm2g_score(const FrameFeatureSequence& reference, const FrameFeatureSequence& query,
                  std::size_t window = 10);

enum class VideoScorer { kF2F, kG2G, kSM2G };

inline constexpr VideoScorer kAllVideoScorers[] = {VideoScorer::kF2F, VideoScorer::kG2G,
                                                   VideoScorer::kSM2G};

std::string_view to_string(VideoScorer scorer);
VideoScorer parse_video_scorer(std::string_view name);

enum class ChunkSide { kReference, kQuery };

/// Dispatch helper; `chunk` picks which side SM2G splits into windows.
double video_score(VideoScorer scorer, const FrameFeatureSequence& reference,
                   const FrameFeatureSequence& query, std::size_t window = 10,
                   ChunkSide chunk = ChunkSide::kReference);

/// is_copy <=> the pair carries at least one segment.
std::vector<VideoPairLabel> labels_from_annotations(std::span<const PairAnnotation> annotations);

std::string scores_csv(std::span<const PairScore> scores, VideoScorer scorer);
std::string labels_csv(std::span<const VideoPairLabel> labels);

}  // namespace vcd
