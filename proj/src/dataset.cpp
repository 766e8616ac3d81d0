#include "vcd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace vcd {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over the combined input.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const FrameFeatureSequence& Dataset::video(std::string_view id) const {
  auto it = std::lower_bound(videos.begin(), videos.end(), id,
                             [](const FrameFeatureSequence& v, std::string_view key) {
                               return v.video_id() < key;
                             });
  if (it == videos.end() || it->video_id() != id) {
    throw Error(ErrorCode::kValidation, "no features for video '" + std::string(id) + "'");
  }
  return *it;
}

bool Dataset::has_video(std::string_view id) const {
  auto it = std::lower_bound(videos.begin(), videos.end(), id,
                             [](const FrameFeatureSequence& v, std::string_view key) {
                               return v.video_id() < key;
                             });
  return it != videos.end() && it->video_id() == id;
}

Dataset assemble_dataset(std::vector<FrameFeatureSequence> videos,
                         std::vector<PairAnnotation> annotations,
                         const std::map<std::string, VideoRole, std::less<>>& roles) {
  Dataset d;
  std::sort(videos.begin(), videos.end(), [](const auto& a, const auto& b) {
    return a.video_id() < b.video_id();
  });
  for (std::size_t k = 1; k < videos.size(); ++k) {
    if (videos[k].video_id() == videos[k - 1].video_id()) {
      throw Error(ErrorCode::kValidation, "duplicate video '" + videos[k].video_id() + "'");
    }
  }
  std::sort(annotations.begin(), annotations.end(), [](const auto& a, const auto& b) {
    return a.key() < b.key();
  });
  for (const auto& v : videos) {
    auto role = roles.find(v.video_id());
    d.manifest.push_back({v.video_id(),
                          role == roles.end() ? VideoRole::kQuery : role->second,
                          static_cast<std::int32_t>(v.length()),
                          "features/" + v.video_id() + ".vcdf"});
  }
  d.videos = std::move(videos);
  d.annotations = std::move(annotations);
  validate_annotations(d.annotations, d.manifest);
  return d;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir / "features");
  for (const auto& entry : dataset.manifest) {
    save_features(dir / entry.feature_path, dataset.video(entry.video_id));
  }
  save_manifest(dir / "manifest.csv", dataset.manifest);
  save_annotations(dir / "annotations.json", dataset.annotations);
}

Dataset read_dataset(const std::filesystem::path& manifest_path,
                     std::optional<std::filesystem::path> annotations_path) {
  const auto dir = manifest_path.parent_path();
  Dataset d;
  d.manifest = load_manifest(manifest_path);
  d.annotations = load_annotations(annotations_path.value_or(dir / "annotations.json"));
  for (const auto& entry : d.manifest) {
    const auto path = dir / entry.feature_path;
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kIo, "missing feature file for video '" + entry.video_id +
                                      "': " + path.string());
    }
    auto seq = load_features(path);
    if (seq.video_id() != entry.video_id) {
      seq = FrameFeatureSequence(entry.video_id, seq.dim(),
                                 std::vector<double>(seq.values().begin(), seq.values().end()));
    }
    if (static_cast<std::int32_t>(seq.length()) != entry.length_seconds) {
      throw Error(ErrorCode::kValidation,
                  "video '" + entry.video_id + "' has " + std::to_string(seq.length()) +
                      " frames but the manifest says " + std::to_string(entry.length_seconds));
    }
    d.videos.push_back(std::move(seq));
  }
  std::sort(d.videos.begin(), d.videos.end(),
            [](const auto& a, const auto& b) { return a.video_id() < b.video_id(); });
  std::sort(d.manifest.begin(), d.manifest.end(),
            [](const auto& a, const auto& b) { return a.video_id < b.video_id; });
  for (const auto& pair : d.annotations) {
    for (const auto* id : {&pair.query_id, &pair.ref_id}) {
      if (!d.has_video(*id)) {
        throw Error(ErrorCode::kValidation,
                    "annotated video '" + *id + "' has no feature file in the manifest");
      }
    }
  }
  validate_annotations(d.annotations, d.manifest);
  return d;
}

std::string_view to_string(ExclusionReason reason) {
  return reason == ExclusionReason::kShorterThanT ? "shorter_than_t" : "no_legal_window";
}

std::optional<PlacementRange> placement_range(std::int32_t video_length,
                                              const CopySegmentPair& gt, std::int32_t t) {
  const std::int32_t c = gt.query_length();
  if (video_length < t || c >= t) return std::nullopt;
  PlacementRange r;
  r.hi = std::min(t - c, gt.query_start);
  // Keep the window inside the video: query_start - p + t <= video_length.
  r.lo = std::max(0, gt.query_start + t - video_length);
  if (r.lo > r.hi) return std::nullopt;
  return r;
}

std::optional<CopySegmentPair> map_segment_to_window(const CopySegmentPair& segment,
                                                     std::int32_t window_start,
                                                     std::int32_t t) {
  const std::int32_t lo = std::max(segment.query_start, window_start);
  const std::int32_t hi = std::min(segment.query_end, window_start + t);
  if (lo >= hi) return std::nullopt;
  const double rate = static_cast<double>(segment.ref_length()) /
                      static_cast<double>(segment.query_length());
  auto ref_at = [&](std::int32_t q) {
    return segment.ref_start +
           static_cast<std::int32_t>(std::lround(static_cast<double>(q - segment.query_start) * rate));
  };
  std::int32_t ref_lo = std::clamp(ref_at(lo), segment.ref_start, segment.ref_end - 1);
  std::int32_t ref_hi = std::clamp(ref_at(hi), ref_lo + 1, segment.ref_end);
  return CopySegmentPair{lo - window_start, hi - window_start, ref_lo, ref_hi};
}

namespace {

void check_gt(const FrameFeatureSequence& query, const CopySegmentPair& gt) {
  validate_segment(gt, static_cast<std::int32_t>(query.length()), std::nullopt);
}

ReconstructionOutcome cut(const FrameFeatureSequence& query, const CopySegmentPair& gt,
                          std::int32_t t, std::int32_t window_start, std::string edited_id) {
  if (edited_id.empty()) edited_id = query.video_id();
  auto annotation = map_segment_to_window(gt, window_start, t);
  return ReconstructedQuery{
      query.slice(std::move(edited_id), static_cast<std::size_t>(window_start),
                  static_cast<std::size_t>(window_start + t)),
      *annotation, window_start};
}

}  // namespace

ReconstructionOutcome reconstruct_query_at(const FrameFeatureSequence& query,
                                           const CopySegmentPair& gt, std::int32_t t,
                                           std::int32_t placement, std::string edited_id) {
  if (t < 1) throw Error(ErrorCode::kConfig, "t must be at least 1");
  check_gt(query, gt);
  const auto n = static_cast<std::int32_t>(query.length());
  if (n < t) return Excluded{ExclusionReason::kShorterThanT};
  if (gt.query_length() >= t) return cut(query, gt, t, gt.query_start, std::move(edited_id));
  const auto range = placement_range(n, gt, t);
  if (!range) return Excluded{ExclusionReason::kNoLegalWindow};
  if (placement < range->lo || placement > range->hi) {
    throw Error(ErrorCode::kValidation,
                "placement " + std::to_string(placement) + " outside legal range [" +
                    std::to_string(range->lo) + ", " + std::to_string(range->hi) + "]");
  }
  return cut(query, gt, t, gt.query_start - placement, std::move(edited_id));
}

ReconstructionOutcome reconstruct_query(const FrameFeatureSequence& query,
                                        const CopySegmentPair& gt,
                                        const ReconstructionParams& params, Rng& rng,
                                        std::string edited_id) {
  if (params.t < 1) throw Error(ErrorCode::kConfig, "t must be at least 1");
  check_gt(query, gt);
  const auto n = static_cast<std::int32_t>(query.length());
  std::int32_t placement = 0;
  if (n >= params.t && gt.query_length() < params.t) {
    const auto range = placement_range(n, gt, params.t);
    if (!range) return Excluded{ExclusionReason::kNoLegalWindow};
    placement = std::uniform_int_distribution<std::int32_t>(range->lo, range->hi)(rng);
  }
  return reconstruct_query_at(query, gt, params.t, placement, std::move(edited_id));
}

AsymmetricDataset build_asymmetric_dataset(const Dataset& input,
                                           const ReconstructionParams& params) {
  if (params.t < 1) throw Error(ErrorCode::kConfig, "t must be at least 1");
  for (const auto& pair : input.annotations) {
    for (const auto* id : {&pair.query_id, &pair.ref_id}) {
      if (!input.has_video(*id)) {
        throw Error(ErrorCode::kIo, "missing feature file for video '" + *id + "'");
      }
    }
  }

  std::set<std::pair<std::string, std::string>> positives;
  for (const auto& pair : input.annotations) {
    if (pair.is_positive()) positives.insert({pair.query_id, pair.ref_id});
  }

  std::vector<FrameFeatureSequence> videos;
  std::vector<PairAnnotation> annotations;
  std::map<std::string, VideoRole, std::less<>> roles;
  std::set<ExclusionRecord> excluded;
  struct Survivor {
    std::string edited_id;
    std::string source_query;
    std::string ref_id;
  };
  std::vector<Survivor> survivors;

  const std::string suffix = "_t" + std::to_string(params.t);
  for (std::size_t index = 0; index < input.annotations.size(); ++index) {
    const auto& pair = input.annotations[index];
    if (!pair.is_positive()) continue;
    const auto& query = input.video(pair.query_id);
    const auto anchor = *std::min_element(pair.segments.begin(), pair.segments.end());
    Rng rng(derive_seed(params.seed, index));
    const std::string edited_id = pair.query_id + "_" + pair.ref_id + suffix;
    auto outcome = reconstruct_query(query, anchor, params, rng, edited_id);
    if (auto* ex = std::get_if<Excluded>(&outcome)) {
      std::string reason(to_string(ex->reason));
      if (ex->reason == ExclusionReason::kNoLegalWindow) reason += "_for_" + pair.ref_id;
      excluded.insert({pair.query_id, reason});
      continue;
    }
    auto& edited = std::get<ReconstructedQuery>(outcome);
    PairAnnotation out{edited_id, pair.ref_id, {}};
    for (const auto& seg : pair.segments) {
      if (auto mapped = map_segment_to_window(seg, edited.window_start, params.t)) {
        out.segments.push_back(*mapped);
      }
    }
    std::sort(out.segments.begin(), out.segments.end());
    out.segments.erase(std::unique(out.segments.begin(), out.segments.end()),
                       out.segments.end());
    annotations.push_back(std::move(out));
    roles[edited_id] = VideoRole::kQuery;
    videos.push_back(std::move(edited.query));
    survivors.push_back({edited_id, pair.query_id, pair.ref_id});
  }

  std::vector<std::string> references;
  for (const auto& e : input.manifest) {
    if (e.role == VideoRole::kReference) references.push_back(e.video_id);
  }
  std::sort(references.begin(), references.end());

  // Enumerate every (edited query, unrelated reference) combination and take
  // a seeded uniform sample of the required size.
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (std::size_t s = 0; s < survivors.size(); ++s) {
    for (std::size_t r = 0; r < references.size(); ++r) {
      if (!positives.contains({survivors[s].source_query, references[r]})) {
        candidates.emplace_back(s, r);
      }
    }
  }
  Rng negative_rng(derive_seed(params.seed, ~std::uint64_t{0}));
  const std::size_t wanted = std::min(survivors.size(), candidates.size());
  for (std::size_t k = 0; k < wanted; ++k) {
    const auto pick = std::uniform_int_distribution<std::size_t>(k, candidates.size() - 1)(negative_rng);
    std::swap(candidates[k], candidates[pick]);
    const auto [s, r] = candidates[k];
    annotations.push_back({survivors[s].edited_id, references[r], {}});
  }

  std::set<std::string> used_refs;
  for (const auto& a : annotations) used_refs.insert(a.ref_id);
  for (const auto& id : used_refs) {
    videos.push_back(input.video(id));
    roles[id] = VideoRole::kReference;
  }

  AsymmetricDataset out;
  out.dataset = assemble_dataset(std::move(videos), std::move(annotations), roles);
  out.excluded.assign(excluded.begin(), excluded.end());
  return out;
}

std::string serialize_exclusions(std::span<const ExclusionRecord> excluded) {
  std::string out = "video_id,reason\n";
  for (const auto& e : excluded) out += e.video_id + "," + e.reason + "\n";
  return out;
}

LengthStats length_stats(std::span<const PairAnnotation> annotations,
                         std::span<const ManifestEntry> manifest) {
  std::map<std::string, std::int32_t, std::less<>> lengths;
  for (const auto& e : manifest) lengths[e.video_id] = e.length_seconds;
  auto length_of = [&](const std::string& id) {
    auto it = lengths.find(id);
    if (it == lengths.end()) {
      throw Error(ErrorCode::kValidation, "video '" + id + "' missing from the manifest");
    }
    return it->second;
  };
  LengthStats stats;
  for (const auto& pair : annotations) {
    PairLengthRow row{pair.query_id, pair.ref_id, length_of(pair.query_id),
                      length_of(pair.ref_id), pair.is_positive()};
    ++stats.query_histogram[row.query_length];
    ++stats.ref_histogram[row.ref_length];
    stats.pairs.push_back(std::move(row));
  }
  return stats;
}

std::string pair_lengths_csv(const LengthStats& stats) {
  std::string out = "query_id,ref_id,query_length,ref_length,is_copy\n";
  for (const auto& r : stats.pairs) {
    out += r.query_id + "," + r.ref_id + "," + std::to_string(r.query_length) + "," +
           std::to_string(r.ref_length) + "," + (r.is_copy ? "1" : "0") + "\n";
  }
  return out;
}

std::string length_histogram_csv(const LengthStats& stats) {
  std::string out = "role,length_seconds,count\n";
  for (const auto& [len, count] : stats.query_histogram) {
    out += "query," + std::to_string(len) + "," + std::to_string(count) + "\n";
  }
  for (const auto& [len, count] : stats.ref_histogram) {
    out += "reference," + std::to_string(len) + "," + std::to_string(count) + "\n";
  }
  return out;
}

}  // namespace vcd
