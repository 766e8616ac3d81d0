#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "vcd/core.hpp"

namespace vcd {

/// 2rp / (r + p), defined as 0 when both are 0.
double f1_score(double recall, double precision);

struct SegmentLevelScores {
  double recall = 0.0;     // SR
  double precision = 0.0;  // SP
  double f1 = 0.0;         // SF1
  std::size_t ground_truth_segments = 0;
  std::size_t detected_ground_truth = 0;
  std::size_t detections = 0;
  std::size_t correct_detections = 0;
};

/// A detection is correct when it overlaps some ground-truth segment of the
/// same pair by at least one frame on both axes.
SegmentLevelScores segment_level(std::span<const DetectionResult> detections,
                                 std::span<const PairAnnotation> truth);

enum class MacroAggregation { kPooled, kPerPairMean };

std::string_view to_string(MacroAggregation a);
MacroAggregation parse_macro_aggregation(std::string_view name);

struct AxisFrameTally {
  std::size_t correct = 0;
  std::size_t ground_truth = 0;
  std::size_t detected = 0;
};

struct FrameLevelScores {
  double recall = 0.0;     // mSR
  double precision = 0.0;  // mSP
  double f1 = 0.0;         // mSF1
  AxisFrameTally query;    // pooled tallies, whatever the aggregation
  AxisFrameTally reference;
};

/// Frame-set recall/precision as a product over the query and reference
/// axes. Pooled mode sums frame tallies over all pairs before taking ratios;
/// per-pair mode averages recall over positive pairs and precision over pairs
/// with detections.
FrameLevelScores macro_segment_level(std::span<const DetectionResult> detections,
                                     std::span<const PairAnnotation> truth,
                                     MacroAggregation aggregation = MacroAggregation::kPooled);

struct PairScore {
  std::string query_id;
  std::string ref_id;
  double score = 0.0;
};

struct VideoPairLabel {
  std::string query_id;
  std::string ref_id;
  bool is_copy = false;
};

/// Micro average precision over pairs ranked by descending score, ties by
/// ascending (query_id, ref_id). Positives that were never scored count as
/// misses. Throws kUndefinedMetric without positives, kUnknownPair for a
/// scored pair lacking a label.
double micro_average_precision(std::span<const PairScore> scores,
                               std::span<const VideoPairLabel> labels);

struct MetricsReport {
  std::optional<double> sr, sp, sf1;
  std::optional<double> msr, msp, msf1;
  std::optional<double> map;
  std::optional<SegmentLevelScores> segment_counts;
  std::optional<FrameLevelScores> frame_counts;
};

MetricsReport make_segment_report(const SegmentLevelScores& seg, const FrameLevelScores& frames);

}  // namespace vcd
