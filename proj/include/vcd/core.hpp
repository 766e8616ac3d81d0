#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vcd {

enum class ErrorCode {
  kParse,
  kValidation,
  kIo,
  kBadMagic,
  kUnsupportedVersion,
  kDimensionMismatch,
  kTruncated,
  kZeroVector,
  kEmptySequence,
  kUnknownPair,
  kUndefinedMetric,
  kConfig,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the toolkit is reported through this type; `code()`
/// distinguishes the failure class for callers that need to branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// One unit-norm embedding per second of video, stored frame-major.
class FrameFeatureSequence {
 public:
  /// Normalizes every frame to unit L2 norm. Throws kZeroVector for an
  /// all-zero frame, kEmptySequence for zero frames, kDimensionMismatch
  /// when `values.size()` is not a multiple of `dim`.
  FrameFeatureSequence(std::string video_id, std::size_t dim,
                       std::vector<double> values);

  const std::string& video_id() const noexcept { return video_id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t length() const noexcept { return values_.size() / dim_; }

  std::span<const double> frame(std::size_t index) const {
    return {values_.data() + index * dim_, dim_};
  }
  std::span<const double> values() const noexcept { return values_; }

  /// Frames [begin, end) as a new sequence with the given id.
  FrameFeatureSequence slice(std::string video_id, std::size_t begin,
                             std::size_t end) const;

 private:
  std::string video_id_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// Half-open integer-second intervals on the query and reference axes.
struct CopySegmentPair {
  std::int32_t query_start = 0;
  std::int32_t query_end = 0;
  std::int32_t ref_start = 0;
  std::int32_t ref_end = 0;

  std::int32_t query_length() const noexcept { return query_end - query_start; }
  std::int32_t ref_length() const noexcept { return ref_end - ref_start; }

  friend auto operator<=>(const CopySegmentPair&,
                          const CopySegmentPair&) = default;
};

/// Throws kValidation unless both intervals are non-empty, non-negative and,
/// when lengths are given, inside the videos.
void validate_segment(const CopySegmentPair& segment,
                      std::optional<std::int32_t> query_length = std::nullopt,
                      std::optional<std::int32_t> ref_length = std::nullopt);

struct PairAnnotation {
  std::string query_id;
  std::string ref_id;
  std::vector<CopySegmentPair> segments;

  bool is_positive() const noexcept { return !segments.empty(); }
  std::string key() const { return query_id + "-" + ref_id; }

  friend bool operator==(const PairAnnotation&, const PairAnnotation&) = default;
};

struct ScoredSegment {
  CopySegmentPair segment;
  double score = 0.0;

  friend bool operator==(const ScoredSegment&, const ScoredSegment&) = default;
};

struct DetectionResult {
  std::string query_id;
  std::string ref_id;
  std::vector<ScoredSegment> detections;
  std::optional<double> score;

  std::string key() const { return query_id + "-" + ref_id; }
};

/// Splits a "queryId-refId" key at the first '-'.
std::pair<std::string, std::string> split_pair_key(std::string_view key);

// Annotation JSON: {"q-r": [[qs, qe, rs, re], ...], ...}. Pairs are returned
// sorted by key.
std::vector<PairAnnotation> parse_annotations(std::string_view text);
std::vector<PairAnnotation> load_annotations(const std::filesystem::path& path);
std::string serialize_annotations(std::span<const PairAnnotation> pairs);
void save_annotations(const std::filesystem::path& path,
                      std::span<const PairAnnotation> pairs);

// Detections share the annotation layout; each quadruple may carry a fifth
// element holding the segment score.
std::vector<DetectionResult> parse_detections(std::string_view text);
std::vector<DetectionResult> load_detections(const std::filesystem::path& path);
std::string serialize_detections(std::span<const DetectionResult> results);
void save_detections(const std::filesystem::path& path,
                     std::span<const DetectionResult> results);

// Binary feature file: "VCDF", u32 version = 1, u32 dim, u32 count, then
// dim * count little-endian float32 values, frame-major.
inline constexpr std::uint32_t kFeatureFormatVersion = 1;

FrameFeatureSequence decode_features(std::string video_id,
                                     std::span<const std::byte> bytes,
                                     std::optional<std::size_t> expected_dim = std::nullopt);
std::vector<std::byte> encode_features(const FrameFeatureSequence& sequence);
/// The filename stem becomes the video id.
FrameFeatureSequence load_features(const std::filesystem::path& path,
                                   std::optional<std::size_t> expected_dim = std::nullopt);
void save_features(const std::filesystem::path& path,
                   const FrameFeatureSequence& sequence);

enum class VideoRole { kQuery, kReference };

struct ManifestEntry {
  std::string video_id;
  VideoRole role = VideoRole::kQuery;
  std::int32_t length_seconds = 0;
  std::string feature_path;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

std::vector<ManifestEntry> parse_manifest(std::string_view text);
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
std::string serialize_manifest(std::span<const ManifestEntry> entries);
void save_manifest(const std::filesystem::path& path,
                   std::span<const ManifestEntry> entries);

/// Checks every segment against the video lengths recorded in the manifest.
void validate_annotations(std::span<const PairAnnotation> pairs,
                          std::span<const ManifestEntry> manifest);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace vcd
