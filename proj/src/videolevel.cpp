#include "vcd/videolevel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace vcd {

std::vector<std::pair<std::size_t, std::size_t>> enumerate_pairs(std::span<const std::string> ids) {
  std::set<std::string_view> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kValidation, "duplicate video id '" + id + "'");
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(unordered_pair_count(ids.size()));
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) out.emplace_back(a, b);
  }
  return out;
}

namespace {

void check_dims(const FrameFeatureSequence& a, const FrameFeatureSequence& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "videos '" + a.video_id() + "' and '" + b.video_id() + "' differ in dimension");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Normalized mean of frames [begin, end).
std::vector<double> mean_direction(const FrameFeatureSequence& v, std::size_t begin,
                                   std::size_t end) {
  std::vector<double> mean(v.dim(), 0.0);
  for (std::size_t f = begin; f < end; ++f) {
    const auto frame = v.frame(f);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += frame[k];
  }
  const double norm = std::sqrt(dot(mean, mean));
  if (!(norm > 1e-12)) {
    throw Error(ErrorCode::kZeroVector,
                "video '" + v.video_id() + "' has a zero mean vector over frames [" +
                    std::to_string(begin) + ", " + std::to_string(end) + ")");
  }
  for (auto& x : mean) x /= norm;
  return mean;
}

}  // namespace

double f2f_score(const FrameFeatureSequence& a, const FrameFeatureSequence& b) {
  check_dims(a, b);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.length(); ++i) {
    const auto x = a.frame(i);
    for (std::size_t j = 0; j < b.length(); ++j) best = std::max(best, dot(x, b.frame(j)));
  }
  return best;
}

double g2g_score(const FrameFeatureSequence& a, const FrameFeatureSequence& b) {
  check_dims(a, b);
  return dot(mean_direction(a, 0, a.length()), mean_direction(b, 0, b.length()));
}

double sm2g_score(const FrameFeatureSequence& reference, const FrameFeatureSequence& query,
                  std::size_t window) {
  check_dims(reference, query);
  if (window == 0) throw Error(ErrorCode::kConfig, "sm2g window must be positive");
  const auto global = mean_direction(query, 0, query.length());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t begin = 0; begin < reference.length(); begin += window) {
    const auto end = std::min(begin + window, reference.length());
    best = std::max(best, dot(mean_direction(reference, begin, end), global));
  }
  return best;
}

std::string_view to_string(VideoScorer scorer) {
  switch (scorer) {
    case VideoScorer::kF2F: return "f2f";
    case VideoScorer::kG2G: return "g2g";
    case VideoScorer::kSM2G: return "sm2g";
  }
  return "?";
}

VideoScorer parse_video_scorer(std::string_view name) {
  for (auto s : kAllVideoScorers) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::kConfig, "unknown video scorer '" + std::string(name) + "'");
}

double video_score(VideoScorer scorer, const FrameFeatureSequence& reference,
                   const FrameFeatureSequence& query, std::size_t window, ChunkSide chunk) {
  switch (scorer) {
    case VideoScorer::kF2F: return f2f_score(reference, query);
    case VideoScorer::kG2G: return g2g_score(reference, query);
    case VideoScorer::kSM2G:
      return chunk == ChunkSide::kReference ? sm2g_score(reference, query, window)
                                            : sm2g_score(query, reference, window);
  }
  return 0.0;
}

std::vector<VideoPairLabel> labels_from_annotations(std::span<const PairAnnotation> annotations) {
  std::vector<VideoPairLabel> out;
  out.reserve(annotations.size());
  for (const auto& a : annotations) out.push_back({a.query_id, a.ref_id, a.is_positive()});
  return out;
}

std::string scores_csv(std::span<const PairScore> scores, VideoScorer scorer) {
  std::string out = "query_id,ref_id,method,score\n";
  char buf[64];
  for (const auto& s : scores) {
    std::snprintf(buf, sizeof buf, ",%.9f\n", s.score);
    out += s.query_id + "," + s.ref_id + "," + std::string(to_string(scorer)) + buf;
  }
  return out;
}

std::string labels_csv(std::span<const VideoPairLabel> labels) {
  std::string out = "query_id,ref_id,is_copy\n";
  for (const auto& l : labels) {
    out += l.query_id + "," + l.ref_id + "," + (l.is_copy ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace vcd
