#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "vcd/dataset.hpp"

namespace vcd {

void validate(const SyntheticConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (c.num_pairs == 0) fail("num_pairs must be positive");
  if (!(c.negative_fraction >= 0.0 && c.negative_fraction <= 1.0)) {
    fail("negative_fraction must lie in [0, 1]");
  }
  for (const auto& [name, r] : {std::pair{"ref_length", c.ref_length},
                                std::pair{"query_length", c.query_length},
                                std::pair{"copy_length", c.copy_length}}) {
    if (r.lo < 1 || r.lo > r.hi) fail(std::string(name) + " must be a non-empty positive range");
  }
  if (c.feature_dim == 0) fail("feature_dim must be positive");
  if (!(c.noise_sigma >= 0.0)) fail("noise_sigma must be non-negative");
}

namespace {

using ordered_json = nlohmann::ordered_json;

LengthRange range_from(const nlohmann::json& doc, const char* key, LengthRange fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw Error(ErrorCode::kParse, std::string(key) + " must be [lo, hi]");
  }
  return {v[0].get<std::int32_t>(), v[1].get<std::int32_t>()};
}

}  // namespace

SyntheticConfig parse_synthetic_config(std::string_view json_text) {
  SyntheticConfig c;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    c.num_pairs = doc.value("num_pairs", c.num_pairs);
    c.negative_fraction = doc.value("negative_fraction", c.negative_fraction);
    c.ref_length = range_from(doc, "ref_length_range", c.ref_length);
    c.query_length = range_from(doc, "query_length_range", c.query_length);
    c.copy_length = range_from(doc, "copy_length_range", c.copy_length);
    c.feature_dim = doc.value("feature_dim", c.feature_dim);
    c.noise_sigma = doc.value("noise_sigma", c.noise_sigma);
    c.seed = doc.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("synthetic config: ") + e.what());
  }
  validate(c);
  return c;
}

std::string serialize_synthetic_config(const SyntheticConfig& c) {
  ordered_json doc;
  doc["num_pairs"] = c.num_pairs;
  doc["negative_fraction"] = c.negative_fraction;
  doc["ref_length_range"] = {c.ref_length.lo, c.ref_length.hi};
  doc["query_length_range"] = {c.query_length.lo, c.query_length.hi};
  doc["copy_length_range"] = {c.copy_length.lo, c.copy_length.hi};
  doc["feature_dim"] = c.feature_dim;
  doc["noise_sigma"] = c.noise_sigma;
  doc["seed"] = c.seed;
  return doc.dump(2) + "\n";
}

namespace {

std::string padded_id(char prefix, std::size_t index, std::size_t count) {
  const int width = static_cast<int>(std::to_string(count > 0 ? count - 1 : 0).size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, index);
  return buf;
}

std::int32_t draw(Rng& rng, LengthRange r) {
  return std::uniform_int_distribution<std::int32_t>(r.lo, r.hi)(rng);
}

void fill_random_directions(std::vector<double>& out, std::size_t frames, std::size_t dim,
                            Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  out.resize(frames * dim);
  for (auto& v : out) v = gauss(rng);
}

}  // namespace

Dataset generate_synthetic(const SyntheticConfig& config) {
  validate(config);
  const std::size_t dim = config.feature_dim;
  const auto negatives = static_cast<std::size_t>(
      std::llround(config.negative_fraction * static_cast<double>(config.num_pairs)));

  std::vector<FrameFeatureSequence> videos;
  std::vector<PairAnnotation> annotations;
  std::map<std::string, VideoRole, std::less<>> roles;
  for (std::size_t i = 0; i < config.num_pairs; ++i) {
    // Spreads the negatives evenly through the pair index range.
    const bool negative = (i + 1) * negatives / config.num_pairs != i * negatives / config.num_pairs;
    Rng rng(derive_seed(config.seed, i));
    const auto ref_len = static_cast<std::size_t>(draw(rng, config.ref_length));
    const auto query_len = static_cast<std::size_t>(draw(rng, config.query_length));

    std::vector<double> ref;
    std::vector<double> query;
    fill_random_directions(ref, ref_len, dim, rng);
    fill_random_directions(query, query_len, dim, rng);

    const auto query_id = padded_id('q', i, config.num_pairs);
    const auto ref_id = padded_id('r', i, config.num_pairs);
    PairAnnotation pair{query_id, ref_id, {}};
    if (!negative) {
      const auto c = std::min<std::int32_t>(
          draw(rng, config.copy_length),
          static_cast<std::int32_t>(std::min(ref_len, query_len)));
      const auto qs = std::uniform_int_distribution<std::int32_t>(
          0, static_cast<std::int32_t>(query_len) - c)(rng);
      const auto rs = std::uniform_int_distribution<std::int32_t>(
          0, static_cast<std::int32_t>(ref_len) - c)(rng);
      std::normal_distribution<double> noise(0.0, 1.0);
      for (std::int32_t k = 0; k < c; ++k) {
        const double* src = ref.data() + static_cast<std::size_t>(rs + k) * dim;
        double* dst = query.data() + static_cast<std::size_t>(qs + k) * dim;
        // The source frame is a raw Gaussian draw; normalize it first so the
        // noise scale is relative to a unit vector.
        double norm2 = 0.0;
        for (std::size_t d = 0; d < dim; ++d) norm2 += src[d] * src[d];
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t d = 0; d < dim; ++d) {
          const double jitter = config.noise_sigma > 0.0 ? config.noise_sigma * noise(rng) : 0.0;
          dst[d] = src[d] * inv + jitter;
        }
      }
      pair.segments.push_back({qs, qs + c, rs, rs + c});
    }
    videos.emplace_back(query_id, dim, std::move(query));
    videos.emplace_back(ref_id, dim, std::move(ref));
    roles[query_id] = VideoRole::kQuery;
    roles[ref_id] = VideoRole::kReference;
    annotations.push_back(std::move(pair));
  }
  return assemble_dataset(std::move(videos), std::move(annotations), roles);
}

}  // namespace vcd
