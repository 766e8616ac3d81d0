#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vcd/core.hpp"

namespace vcd {

using Rng = std::mt19937_64;

/// Independent, reproducible stream seed for item `index` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Videos, annotations and manifest held together. Videos and manifest are
/// sorted by id, annotations by pair key; feature paths are relative to the
/// dataset directory.
struct Dataset {
  std::vector<FrameFeatureSequence> videos;
  std::vector<PairAnnotation> annotations;
  std::vector<ManifestEntry> manifest;

  const FrameFeatureSequence& video(std::string_view id) const;
  bool has_video(std::string_view id) const;
};

/// Sorts everything and derives manifest entries from the videos; `roles`
/// assigns query/reference per id.
Dataset assemble_dataset(std::vector<FrameFeatureSequence> videos,
                         std::vector<PairAnnotation> annotations,
                         const std::map<std::string, VideoRole, std::less<>>& roles);

/// Writes manifest.csv, annotations.json and features/<id>.vcdf under dir.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);
/// Reads a dataset from its manifest; annotations default to the manifest's
/// sibling annotations.json. Fails naming any video without a feature file.
Dataset read_dataset(const std::filesystem::path& manifest_path,
                     std::optional<std::filesystem::path> annotations_path = std::nullopt);

// ---------------------------------------------------------------------------
// Asymmetric short-query reconstruction.

struct ReconstructionParams {
  std::int32_t t = 10;  // target query length, seconds
  std::uint64_t seed = 0;
};

enum class ExclusionReason { kShorterThanT, kNoLegalWindow };
std::string_view to_string(ExclusionReason reason);

struct Excluded {
  ExclusionReason reason;
};

struct ReconstructedQuery {
  FrameFeatureSequence query;   // exactly t frames
  CopySegmentPair annotation;   // in edited-query coordinates
  std::int32_t window_start;    // source frame of edited frame 0
};

using ReconstructionOutcome = std::variant<ReconstructedQuery, Excluded>;

/// Legal placement offsets p for a copy shorter than t: p in [lo, hi] puts
/// the copy at [p, p + c) of a window starting at query_start - p that fits
/// inside the video.
struct PlacementRange {
  std::int32_t lo = 0;
  std::int32_t hi = 0;
};
std::optional<PlacementRange> placement_range(std::int32_t video_length,
                                              const CopySegmentPair& gt, std::int32_t t);

/// Clips a segment to the query window [window_start, window_start + t) and
/// shifts it into window coordinates. The reference interval shrinks in
/// proportion to the clipped query interval. nullopt when nothing remains.
std::optional<CopySegmentPair> map_segment_to_window(const CopySegmentPair& segment,
                                                     std::int32_t window_start,
                                                     std::int32_t t);

/// Builds the t-second edited query with an explicit placement offset
/// (ignored when the copy is at least t long).
ReconstructionOutcome reconstruct_query_at(const FrameFeatureSequence& query,
                                           const CopySegmentPair& gt, std::int32_t t,
                                           std::int32_t placement,
                                           std::string edited_id = {});

/// Draws the placement offset uniformly from its legal range.
ReconstructionOutcome reconstruct_query(const FrameFeatureSequence& query,
                                        const CopySegmentPair& gt,
                                        const ReconstructionParams& params, Rng& rng,
                                        std::string edited_id = {});

struct ExclusionRecord {
  std::string video_id;
  std::string reason;
  friend auto operator<=>(const ExclusionRecord&, const ExclusionRecord&) = default;
};

struct AsymmetricDataset {
  Dataset dataset;
  std::vector<ExclusionRecord> excluded;
};

/// Edits every positive pair's query to length t (one edited query per pair),
/// then pairs edited queries with unrelated references to produce as many
/// negatives as surviving positives. Input negatives are discarded.
AsymmetricDataset build_asymmetric_dataset(const Dataset& input,
                                           const ReconstructionParams& params);

std::string serialize_exclusions(std::span<const ExclusionRecord> excluded);

// ---------------------------------------------------------------------------
// Synthetic planted-copy data.

struct LengthRange {
  std::int32_t lo = 1;
  std::int32_t hi = 1;
};

struct SyntheticConfig {
  std::size_t num_pairs = 100;
  double negative_fraction = 0.5;
  LengthRange ref_length{60, 180};
  LengthRange query_length{20, 60};
  LengthRange copy_length{5, 30};
  std::size_t feature_dim = 64;
  double noise_sigma = 0.1;  // per-component Gaussian sigma on copied frames
  std::uint64_t seed = 0;
};

void validate(const SyntheticConfig& config);
SyntheticConfig parse_synthetic_config(std::string_view json_text);
std::string serialize_synthetic_config(const SyntheticConfig& config);

/// Pair i uses query q<i> and reference r<i>. Positive pairs copy one
/// reference interval into the query with additive noise; everything else is
/// an independent random direction.
Dataset generate_synthetic(const SyntheticConfig& config);

// ---------------------------------------------------------------------------
// Length statistics.

struct PairLengthRow {
  std::string query_id;
  std::string ref_id;
  std::int32_t query_length = 0;
  std::int32_t ref_length = 0;
  bool is_copy = false;
};

struct LengthStats {
  std::vector<PairLengthRow> pairs;
  std::map<std::int32_t, std::size_t> query_histogram;  // length -> pair count
  std::map<std::int32_t, std::size_t> ref_histogram;
};

LengthStats length_stats(std::span<const PairAnnotation> annotations,
                         std::span<const ManifestEntry> manifest);
std::string pair_lengths_csv(const LengthStats& stats);
std::string length_histogram_csv(const LengthStats& stats);

}  // namespace vcd
