#include "vcd/align.hpp"

#include <algorithm>
#include <cmath>

#include "align_internal.hpp"
#include "json.hpp"

namespace vcd {

std::string_view to_string(AlignMethod method) {
  switch (method) {
    case AlignMethod::kHoughVoting: return "hv";
    case AlignMethod::kTemporalNetwork: return "tn";
    case AlignMethod::kDynamicProgramming: return "dp";
    case AlignMethod::kDtw: return "dtw";
  }
  return "?";
}

AlignMethod parse_align_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto m : kAllAlignMethods) {
    if (to_string(m) == lower) return m;
  }
  throw Error(ErrorCode::kConfig, "unknown alignment method '" + std::string(name) + "'");
}

void validate(const AlignParams& p) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (!(p.sim_threshold >= -1.0 && p.sim_threshold <= 1.0)) {
    fail("sim_threshold must lie in [-1, 1]");
  }
  if (p.max_gap < 1) fail("max_gap must be positive");
  if (p.min_length < 1) fail("min_length must be at least 1");
  if (p.offset_bin_width < 1) fail("offset_bin_width must be positive");
  if (!(p.diag_penalty >= 0.0) || !std::isfinite(p.diag_penalty)) {
    fail("diag_penalty must be a finite non-negative number");
  }
  if (p.band_radius && *p.band_radius < 1) fail("band_radius must be positive");
}

std::string serialize_align_params(const AlignParams& p) {
  nlohmann::ordered_json doc;
  doc["method"] = std::string(to_string(p.method));
  doc["sim_threshold"] = p.sim_threshold;
  doc["max_gap"] = p.max_gap;
  doc["min_length"] = p.min_length;
  doc["offset_bin_width"] = p.offset_bin_width;
  doc["diag_penalty"] = p.diag_penalty;
  doc["band_radius"] = p.band_radius ? nlohmann::ordered_json(*p.band_radius)
                                     : nlohmann::ordered_json(nullptr);
  return doc.dump(2) + "\n";
}

AlignParams parse_align_params(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("align params: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "align params must be an object");
  AlignParams p;
  try {
    if (doc.contains("method")) p.method = parse_align_method(doc["method"].get<std::string>());
    p.sim_threshold = doc.value("sim_threshold", p.sim_threshold);
    p.max_gap = doc.value("max_gap", p.max_gap);
    p.min_length = doc.value("min_length", p.min_length);
    p.offset_bin_width = doc.value("offset_bin_width", p.offset_bin_width);
    p.diag_penalty = doc.value("diag_penalty", p.diag_penalty);
    if (doc.contains("band_radius") && !doc["band_radius"].is_null()) {
      p.band_radius = doc["band_radius"].get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("align params: ") + e.what());
  }
  validate(p);
  return p;
}

namespace detail {

void require_method(const AlignParams& p, AlignMethod method, const char* caller) {
  if (p.method != method) {
    throw Error(ErrorCode::kConfig, std::string(caller) + " called with " +
                                        std::string(to_string(p.method)) + " params");
  }
  validate(p);
}

}  // namespace detail

std::vector<AlignCandidate> align_candidates(const SimilarityMatrix& s, const AlignParams& p) {
  switch (p.method) {
    case AlignMethod::kHoughVoting: return detail::hough_candidates(s, p);
    case AlignMethod::kTemporalNetwork: return detail::tn_candidates(s, p);
    case AlignMethod::kDynamicProgramming: return detail::dp_candidates(s, p);
    case AlignMethod::kDtw: return detail::dtw_candidates(s, p);
  }
  return {};
}

std::vector<ScoredSegment> finalize_candidates(std::span<const AlignCandidate> candidates,
                                               int min_length) {
  std::vector<ScoredSegment> kept;
  for (const auto& c : candidates) {
    const auto& g = c.segment.segment;
    if (c.gate >= static_cast<double>(min_length) && g.query_length() >= min_length &&
        g.ref_length() >= min_length) {
      kept.push_back(c.segment);
    }
  }
  return resolve_overlaps(std::move(kept));
}

std::vector<ScoredSegment> align(const SimilarityMatrix& s, const AlignParams& p) {
  return finalize_candidates(align_candidates(s, p), p.min_length);
}

std::vector<ScoredSegment> hough_voting(const SimilarityMatrix& s, const AlignParams& p) {
  detail::require_method(p, AlignMethod::kHoughVoting, "hough_voting");
  return align(s, p);
}

std::vector<ScoredSegment> temporal_network(const SimilarityMatrix& s, const AlignParams& p) {
  detail::require_method(p, AlignMethod::kTemporalNetwork, "temporal_network");
  return align(s, p);
}

std::vector<ScoredSegment> dynamic_programming(const SimilarityMatrix& s, const AlignParams& p) {
  detail::require_method(p, AlignMethod::kDynamicProgramming, "dynamic_programming");
  return align(s, p);
}

std::vector<ScoredSegment> dtw_align(const SimilarityMatrix& s, const AlignParams& p) {
  detail::require_method(p, AlignMethod::kDtw, "dtw_align");
  return align(s, p);
}

namespace {

bool overlaps_both_axes(const CopySegmentPair& a, const CopySegmentPair& b) {
  return a.query_start < b.query_end && b.query_start < a.query_end &&
         a.ref_start < b.ref_end && b.ref_start < a.ref_end;
}

}  // namespace

std::vector<ScoredSegment> resolve_overlaps(std::vector<ScoredSegment> segments) {
  std::sort(segments.begin(), segments.end(),
            [](const ScoredSegment& a, const ScoredSegment& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.segment < b.segment;
            });
  std::vector<ScoredSegment> kept;
  for (auto& candidate : segments) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const ScoredSegment& k) {
      return overlaps_both_axes(k.segment, candidate.segment);
    });
    if (!clash) kept.push_back(candidate);
  }
  return kept;
}

}  // namespace vcd
