#include "vcd/metrics.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace vcd {

double f1_score(double recall, double precision) {
  const double sum = recall + precision;
  return sum > 0.0 ? 2.0 * recall * precision / sum : 0.0;
}

namespace {

bool overlaps(std::int32_t a0, std::int32_t a1, std::int32_t b0, std::int32_t b1) {
  return a0 < b1 && b0 < a1;
}

bool overlaps_both(const CopySegmentPair& a, const CopySegmentPair& b) {
  return overlaps(a.query_start, a.query_end, b.query_start, b.query_end) &&
         overlaps(a.ref_start, a.ref_end, b.ref_start, b.ref_end);
}

using PairKey = std::pair<std::string, std::string>;

struct Joined {
  const PairAnnotation* truth = nullptr;
  std::vector<CopySegmentPair> detected;
};

// Groups detections under their annotated pair; rejects unknown pairs.
std::map<PairKey, Joined> join(std::span<const DetectionResult> detections,
                               std::span<const PairAnnotation> truth) {
  std::map<PairKey, Joined> out;
  for (const auto& t : truth) out[{t.query_id, t.ref_id}].truth = &t;
  for (const auto& d : detections) {
    auto it = out.find({d.query_id, d.ref_id});
    if (it == out.end()) {
      throw Error(ErrorCode::kUnknownPair,
                  "detection for pair '" + d.key() + "' has no annotation");
    }
    for (const auto& s : d.detections) it->second.detected.push_back(s.segment);
  }
  return out;
}

using Interval = std::pair<std::int32_t, std::int32_t>;

std::vector<Interval> merged(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

std::size_t covered(const std::vector<Interval>& v) {
  std::size_t total = 0;
  for (const auto& [a, b] : v) total += static_cast<std::size_t>(b - a);
  return total;
}

std::size_t intersection(const std::vector<Interval>& x, const std::vector<Interval>& y) {
  std::size_t total = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() && j < y.size()) {
    const auto lo = std::max(x[i].first, y[j].first);
    const auto hi = std::min(x[i].second, y[j].second);
    if (lo < hi) total += static_cast<std::size_t>(hi - lo);
    (x[i].second < y[j].second) ? ++i : ++j;
  }
  return total;
}

AxisFrameTally tally(const std::vector<CopySegmentPair>& detected,
                     const std::vector<CopySegmentPair>& truth, bool query_axis) {
  std::vector<Interval> d;
  std::vector<Interval> g;
  for (const auto& s : detected) {
    d.push_back(query_axis ? Interval{s.query_start, s.query_end}
                           : Interval{s.ref_start, s.ref_end});
  }
  for (const auto& s : truth) {
    g.push_back(query_axis ? Interval{s.query_start, s.query_end}
                           : Interval{s.ref_start, s.ref_end});
  }
  const auto dm = merged(std::move(d));
  const auto gm = merged(std::move(g));
  return {intersection(dm, gm), covered(gm), covered(dm)};
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

SegmentLevelScores segment_level(std::span<const DetectionResult> detections,
                                 std::span<const PairAnnotation> truth) {
  SegmentLevelScores out;
  for (const auto& [key, pair] : join(detections, truth)) {
    const auto& gt = pair.truth->segments;
    out.ground_truth_segments += gt.size();
    out.detections += pair.detected.size();
    for (const auto& d : pair.detected) {
      if (std::any_of(gt.begin(), gt.end(),
                      [&](const CopySegmentPair& g) { return overlaps_both(d, g); })) {
        ++out.correct_detections;
      }
    }
    for (const auto& g : gt) {
      if (std::any_of(pair.detected.begin(), pair.detected.end(),
                      [&](const CopySegmentPair& d) { return overlaps_both(d, g); })) {
        ++out.detected_ground_truth;
      }
    }
  }
  out.recall = ratio(out.detected_ground_truth, out.ground_truth_segments);
  out.precision = ratio(out.correct_detections, out.detections);
  out.f1 = f1_score(out.recall, out.precision);
  return out;
}

std::string_view to_string(MacroAggregation a) {
  return a == MacroAggregation::kPooled ? "pooled" : "per-pair-mean";
}

MacroAggregation parse_macro_aggregation(std::string_view name) {
  if (name == "pooled") return MacroAggregation::kPooled;
  if (name == "per-pair-mean") return MacroAggregation::kPerPairMean;
  throw Error(ErrorCode::kConfig, "unknown aggregation '" + std::string(name) + "'");
}

FrameLevelScores macro_segment_level(std::span<const DetectionResult> detections,
                                     std::span<const PairAnnotation> truth,
                                     MacroAggregation aggregation) {
  FrameLevelScores out;
  double recall_sum = 0.0;
  double precision_sum = 0.0;
  std::size_t recall_pairs = 0;
  std::size_t precision_pairs = 0;
  for (const auto& [key, pair] : join(detections, truth)) {
    const auto q = tally(pair.detected, pair.truth->segments, true);
    const auto r = tally(pair.detected, pair.truth->segments, false);
    for (auto [total, part] : {std::pair{&out.query, q}, std::pair{&out.reference, r}}) {
      total->correct += part.correct;
      total->ground_truth += part.ground_truth;
      total->detected += part.detected;
    }
    if (!pair.truth->segments.empty()) {
      recall_sum += ratio(q.correct, q.ground_truth) * ratio(r.correct, r.ground_truth);
      ++recall_pairs;
    }
    if (!pair.detected.empty()) {
      precision_sum += ratio(q.correct, q.detected) * ratio(r.correct, r.detected);
      ++precision_pairs;
    }
  }
  if (aggregation == MacroAggregation::kPooled) {
    out.recall = ratio(out.query.correct, out.query.ground_truth) *
                 ratio(out.reference.correct, out.reference.ground_truth);
    out.precision = ratio(out.query.correct, out.query.detected) *
                    ratio(out.reference.correct, out.reference.detected);
  } else {
    out.recall = recall_pairs ? recall_sum / static_cast<double>(recall_pairs) : 0.0;
    out.precision = precision_pairs ? precision_sum / static_cast<double>(precision_pairs) : 0.0;
  }
  out.f1 = f1_score(out.recall, out.precision);
  return out;
}

double micro_average_precision(std::span<const PairScore> scores,
                               std::span<const VideoPairLabel> labels) {
  std::map<PairKey, bool> is_copy;
  std::size_t positives = 0;
  for (const auto& l : labels) {
    is_copy[{l.query_id, l.ref_id}] = l.is_copy;
    positives += l.is_copy ? 1 : 0;
  }
  if (positives == 0) {
    throw Error(ErrorCode::kUndefinedMetric, "average precision needs at least one positive pair");
  }
  struct Ranked {
    const PairScore* s;
    bool positive;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(scores.size());
  for (const auto& s : scores) {
    auto it = is_copy.find({s.query_id, s.ref_id});
    if (it == is_copy.end()) {
      throw Error(ErrorCode::kUnknownPair,
                  "scored pair '" + s.query_id + "-" + s.ref_id + "' has no label");
    }
    ranked.push_back({&s, it->second});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.s->score != b.s->score) return a.s->score > b.s->score;
    return std::tie(a.s->query_id, a.s->ref_id) < std::tie(b.s->query_id, b.s->ref_id);
  });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (ranked[k].positive) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(positives);
}

MetricsReport make_segment_report(const SegmentLevelScores& seg, const FrameLevelScores& frames) {
  MetricsReport r;
  r.sr = seg.recall;
  r.sp = seg.precision;
  r.sf1 = seg.f1;
  r.msr = frames.recall;
  r.msp = frames.precision;
  r.msf1 = frames.f1;
  r.segment_counts = seg;
  r.frame_counts = frames;
  return r;
}

}  // namespace vcd
