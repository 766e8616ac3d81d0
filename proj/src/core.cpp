#include "vcd/core.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"

namespace vcd {

using nlohmann::json;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported version";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kTruncated: return "truncated file";
    case ErrorCode::kZeroVector: return "zero vector";
    case ErrorCode::kEmptySequence: return "empty sequence";
    case ErrorCode::kUnknownPair: return "unknown pair";
    case ErrorCode::kUndefinedMetric: return "undefined metric";
    case ErrorCode::kConfig: return "configuration error";
  }
  return "unknown error";
}

FrameFeatureSequence::FrameFeatureSequence(std::string video_id,
                                           std::size_t dim,
                                           std::vector<double> values)
    : video_id_(std::move(video_id)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "video '" + video_id_ + "': feature dimension must be positive");
  }
  if (values_.size() % dim_ != 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                "video '" + video_id_ + "': " + std::to_string(values_.size()) +
                    " values is not a multiple of dim " + std::to_string(dim_));
  }
  if (values_.empty()) {
    throw Error(ErrorCode::kEmptySequence,
                "video '" + video_id_ + "' has no frames");
  }
  for (std::size_t f = 0; f < length(); ++f) {
    double* row = values_.data() + f * dim_;
    double norm2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) norm2 += row[k] * row[k];
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
      throw Error(ErrorCode::kZeroVector,
                  "video '" + video_id_ + "': frame " + std::to_string(f) +
                      " cannot be normalized");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t k = 0; k < dim_; ++k) row[k] *= inv;
  }
}

FrameFeatureSequence FrameFeatureSequence::slice(std::string video_id,
                                                 std::size_t begin,
                                                 std::size_t end) const {
  if (begin >= end || end > length()) {
    throw Error(ErrorCode::kValidation,
                "slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                    ") outside video '" + video_id_ + "' of length " +
                    std::to_string(length()));
  }
  std::vector<double> out(values_.begin() + static_cast<std::ptrdiff_t>(begin * dim_),
                          values_.begin() + static_cast<std::ptrdiff_t>(end * dim_));
  return FrameFeatureSequence(std::move(video_id), dim_, std::move(out));
}

namespace {

std::string describe(const CopySegmentPair& s) {
  std::ostringstream os;
  os << "[" << s.query_start << ", " << s.query_end << ", " << s.ref_start
     << ", " << s.ref_end << "]";
  return os.str();
}

}  // namespace

void validate_segment(const CopySegmentPair& segment,
                      std::optional<std::int32_t> query_length,
                      std::optional<std::int32_t> ref_length) {
  if (segment.query_start < 0 || segment.ref_start < 0) {
    throw Error(ErrorCode::kValidation,
                "segment " + describe(segment) + " has a negative bound");
  }
  if (segment.query_start >= segment.query_end ||
      segment.ref_start >= segment.ref_end) {
    throw Error(ErrorCode::kValidation,
                "segment " + describe(segment) + " has an empty interval");
  }
  if (query_length && segment.query_end > *query_length) {
    throw Error(ErrorCode::kValidation,
                "segment " + describe(segment) + " exceeds query length " +
                    std::to_string(*query_length));
  }
  if (ref_length && segment.ref_end > *ref_length) {
    throw Error(ErrorCode::kValidation,
                "segment " + describe(segment) + " exceeds reference length " +
                    std::to_string(*ref_length));
  }
}

std::pair<std::string, std::string> split_pair_key(std::string_view key) {
  const auto dash = key.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 == key.size()) {
    throw Error(ErrorCode::kParse,
                "pair key '" + std::string(key) + "' is not of the form queryId-refId");
  }
  return {std::string(key.substr(0, dash)), std::string(key.substr(dash + 1))};
}

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Parses a top-level object while rejecting duplicate keys, which nlohmann
// would otherwise silently collapse.
json parse_pair_object(std::string_view text) {
  std::set<std::string> seen;
  std::string duplicate;
  json::parser_callback_t cb = [&](int depth, json::parse_event_t event,
                                   json& parsed) {
    if (event == json::parse_event_t::key && depth == 1) {
      auto key = parsed.get<std::string>();
      if (!seen.insert(key).second && duplicate.empty()) duplicate = key;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_of(text, e.byte)) +
                                       ": " + e.what());
  }
  if (!duplicate.empty()) {
    throw Error(ErrorCode::kParse, "duplicate pair key '" + duplicate + "'");
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParse, "top-level value must be an object of pairs");
  }
  return doc;
}

std::int32_t bound_from(const json& value, const std::string& key) {
  if (!value.is_number_integer()) {
    throw Error(ErrorCode::kParse,
                "key '" + key + "': segment bounds must be integers");
  }
  const auto v = value.get<std::int64_t>();
  if (v < 0 || v > std::numeric_limits<std::int32_t>::max()) {
    throw Error(ErrorCode::kValidation,
                "key '" + key + "': segment bound " + std::to_string(v) +
                    " out of range");
  }
  return static_cast<std::int32_t>(v);
}

struct ParsedSegment {
  CopySegmentPair segment;
  std::optional<double> score;
};

std::vector<ParsedSegment> segments_from(const json& array, const std::string& key,
                                         bool allow_score) {
  if (!array.is_array()) {
    throw Error(ErrorCode::kParse, "key '" + key + "': value must be an array");
  }
  std::vector<ParsedSegment> out;
  for (const auto& item : array) {
    const bool ok_size =
        item.is_array() && (item.size() == 4 || (allow_score && item.size() == 5));
    if (!ok_size) {
      throw Error(ErrorCode::kParse,
                  "key '" + key + "': each segment must be [qs, qe, rs, re]" +
                      std::string(allow_score ? " with an optional score" : ""));
    }
    ParsedSegment p;
    p.segment = {bound_from(item[0], key), bound_from(item[1], key),
                 bound_from(item[2], key), bound_from(item[3], key)};
    if (item.size() == 5) {
      if (!item[4].is_number()) {
        throw Error(ErrorCode::kParse, "key '" + key + "': score must be numeric");
      }
      p.score = item[4].get<double>();
    }
    try {
      validate_segment(p.segment);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, "pair '" + key + "': " + e.what());
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<PairAnnotation> parse_annotations(std::string_view text) {
  const json doc = parse_pair_object(text);
  std::vector<PairAnnotation> out;
  out.reserve(doc.size());
  for (const auto& [key, value] : doc.items()) {
    auto [query, ref] = split_pair_key(key);
    PairAnnotation pair{std::move(query), std::move(ref), {}};
    for (const auto& p : segments_from(value, key, false)) {
      pair.segments.push_back(p.segment);
    }
    auto sorted = pair.segments;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::kValidation, "pair '" + key + "' repeats a segment");
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<PairAnnotation> load_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_text_file(path));
}

namespace {

void check_id(const std::string& id) {
  if (id.empty() || id.find('-') != std::string::npos) {
    throw Error(ErrorCode::kValidation,
                "video id '" + id + "' must be non-empty and free of '-'");
  }
}

}  // namespace

std::string serialize_annotations(std::span<const PairAnnotation> pairs) {
  json doc = json::object();
  for (const auto& pair : pairs) {
    check_id(pair.query_id);
    check_id(pair.ref_id);
    if (doc.contains(pair.key())) {
      throw Error(ErrorCode::kValidation, "duplicate pair key '" + pair.key() + "'");
    }
    json segments = json::array();
    for (const auto& s : pair.segments) {
      segments.push_back({s.query_start, s.query_end, s.ref_start, s.ref_end});
    }
    doc[pair.key()] = std::move(segments);
  }
  return doc.dump(1) + "\n";
}

void save_annotations(const std::filesystem::path& path,
                      std::span<const PairAnnotation> pairs) {
  write_text_file(path, serialize_annotations(pairs));
}

std::vector<DetectionResult> parse_detections(std::string_view text) {
  const json doc = parse_pair_object(text);
  std::vector<DetectionResult> out;
  for (const auto& [key, value] : doc.items()) {
    auto [query, ref] = split_pair_key(key);
    DetectionResult result{std::move(query), std::move(ref), {}, std::nullopt};
    for (const auto& p : segments_from(value, key, true)) {
      result.detections.push_back({p.segment, p.score.value_or(0.0)});
    }
    out.push_back(std::move(result));
  }
  return out;
}

std::vector<DetectionResult> load_detections(const std::filesystem::path& path) {
  return parse_detections(read_text_file(path));
}

std::string serialize_detections(std::span<const DetectionResult> results) {
  json doc = json::object();
  for (const auto& r : results) {
    check_id(r.query_id);
    check_id(r.ref_id);
    json segments = json::array();
    for (const auto& d : r.detections) {
      const auto& s = d.segment;
      segments.push_back({s.query_start, s.query_end, s.ref_start, s.ref_end, d.score});
    }
    doc[r.key()] = std::move(segments);
  }
  return doc.dump(1) + "\n";
}

void save_detections(const std::filesystem::path& path,
                     std::span<const DetectionResult> results) {
  write_text_file(path, serialize_detections(results));
}

namespace {

constexpr std::size_t kHeaderBytes = 16;

std::uint32_t read_u32_le(std::span<const std::byte> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) {
    v = (v << 8) | std::to_integer<std::uint32_t>(bytes[at + static_cast<std::size_t>(k)]);
  }
  return v;
}

void append_u32_le(std::vector<std::byte>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) {
    out.push_back(static_cast<std::byte>((v >> (8 * k)) & 0xffu));
  }
}

}  // namespace

FrameFeatureSequence decode_features(std::string video_id,
                                     std::span<const std::byte> bytes,
                                     std::optional<std::size_t> expected_dim) {
  if (bytes.size() < kHeaderBytes) {
    throw Error(ErrorCode::kTruncated,
                "feature file for '" + video_id + "' is shorter than its header");
  }
  constexpr char kMagic[4] = {'V', 'C', 'D', 'F'};
  for (std::size_t k = 0; k < 4; ++k) {
    if (bytes[k] != static_cast<std::byte>(kMagic[k])) {
      throw Error(ErrorCode::kBadMagic,
                  "feature file for '" + video_id + "' lacks the VCDF magic");
    }
  }
  const auto version = read_u32_le(bytes, 4);
  if (version != kFeatureFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "feature file for '" + video_id + "' has version " +
                    std::to_string(version));
  }
  const std::size_t dim = read_u32_le(bytes, 8);
  const std::size_t count = read_u32_le(bytes, 12);
  if (dim == 0 || (expected_dim && dim != *expected_dim)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature file for '" + video_id + "' has dim " +
                    std::to_string(dim) +
                    (expected_dim ? ", expected " + std::to_string(*expected_dim) : ""));
  }
  const std::size_t payload = dim * count * 4;
  if (bytes.size() < kHeaderBytes + payload) {
    throw Error(ErrorCode::kTruncated,
                "feature file for '" + video_id + "' holds " +
                    std::to_string(bytes.size() - kHeaderBytes) + " payload bytes, header declares " +
                    std::to_string(payload));
  }
  if (bytes.size() > kHeaderBytes + payload) {
    throw Error(ErrorCode::kParse,
                "feature file for '" + video_id + "' has trailing bytes");
  }
  std::vector<double> values(dim * count);
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = std::bit_cast<float>(read_u32_le(bytes, kHeaderBytes + 4 * k));
  }
  return FrameFeatureSequence(std::move(video_id), dim, std::move(values));
}

std::vector<std::byte> encode_features(const FrameFeatureSequence& sequence) {
  std::vector<std::byte> out;
  out.reserve(kHeaderBytes + sequence.values().size() * 4);
  for (char c : {'V', 'C', 'D', 'F'}) out.push_back(static_cast<std::byte>(c));
  append_u32_le(out, kFeatureFormatVersion);
  append_u32_le(out, static_cast<std::uint32_t>(sequence.dim()));
  append_u32_le(out, static_cast<std::uint32_t>(sequence.length()));
  for (double v : sequence.values()) {
    append_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

FrameFeatureSequence load_features(const std::filesystem::path& path,
                                   std::optional<std::size_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  return decode_features(path.stem().string(), std::as_bytes(std::span(raw)),
                         expected_dim);
}

void save_features(const std::filesystem::path& path,
                   const FrameFeatureSequence& sequence) {
  const auto bytes = encode_features(sequence);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

namespace {

constexpr std::string_view kManifestHeader = "video_id,role,length_seconds,feature_path";

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
  std::vector<ManifestEntry> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kManifestHeader) {
        throw Error(ErrorCode::kParse, "manifest line 1: expected header '" +
                                           std::string(kManifestHeader) + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const auto where = "manifest line " + std::to_string(line_no) + ": ";
    if (fields.size() != 4) throw Error(ErrorCode::kParse, where + "expected 4 fields");
    ManifestEntry e;
    e.video_id = std::string(fields[0]);
    if (fields[1] == "query") {
      e.role = VideoRole::kQuery;
    } else if (fields[1] == "reference") {
      e.role = VideoRole::kReference;
    } else {
      throw Error(ErrorCode::kParse, where + "role must be query or reference");
    }
    const auto len = fields[2];
    auto [ptr, ec] = std::from_chars(len.data(), len.data() + len.size(), e.length_seconds);
    if (ec != std::errc() || ptr != len.data() + len.size() || e.length_seconds <= 0) {
      throw Error(ErrorCode::kParse, where + "length_seconds must be a positive integer");
    }
    e.feature_path = std::string(fields[3]);
    if (e.video_id.empty()) throw Error(ErrorCode::kParse, where + "empty video_id");
    if (!seen.insert(e.video_id).second) {
      throw Error(ErrorCode::kValidation, where + "duplicate video_id '" + e.video_id + "'");
    }
    out.push_back(std::move(e));
  }
  if (line_no == 0) throw Error(ErrorCode::kParse, "manifest is empty");
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path));
}

std::string serialize_manifest(std::span<const ManifestEntry> entries) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& e : entries) {
    if (e.video_id.find(',') != std::string::npos ||
        e.feature_path.find(',') != std::string::npos) {
      throw Error(ErrorCode::kValidation, "manifest fields must not contain commas");
    }
    out += e.video_id;
    out += e.role == VideoRole::kQuery ? ",query," : ",reference,";
    out += std::to_string(e.length_seconds);
    out += ',';
    out += e.feature_path;
    out += '\n';
  }
  return out;
}

void save_manifest(const std::filesystem::path& path,
                   std::span<const ManifestEntry> entries) {
  write_text_file(path, serialize_manifest(entries));
}

void validate_annotations(std::span<const PairAnnotation> pairs,
                          std::span<const ManifestEntry> manifest) {
  std::map<std::string, std::int32_t, std::less<>> lengths;
  for (const auto& e : manifest) lengths[e.video_id] = e.length_seconds;
  auto length_of = [&](const std::string& id, const std::string& key) {
    auto it = lengths.find(id);
    if (it == lengths.end()) {
      throw Error(ErrorCode::kValidation,
                  "pair '" + key + "' references video '" + id + "' missing from the manifest");
    }
    return it->second;
  };
  for (const auto& pair : pairs) {
    const auto key = pair.key();
    const auto q = length_of(pair.query_id, key);
    const auto r = length_of(pair.ref_id, key);
    for (const auto& s : pair.segments) {
      try {
        validate_segment(s, q, r);
      } catch (const Error& e) {
        throw Error(ErrorCode::kValidation, "pair '" + key + "': " + e.what());
      }
    }
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace vcd
