#include "vcd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include "json.hpp"

namespace vcd {

using ordered_json = nlohmann::ordered_json;

std::size_t default_worker_count() {
  if (const char* env = std::getenv("VCD_WORKERS")) {
    char* end = nullptr;
    const auto v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::min(std::max<std::size_t>(workers, 1), count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

namespace {
std::atomic<bool> g_logging{true};
std::mutex g_log_mutex;
}  // namespace

void set_logging(bool enabled) { g_logging = enabled; }

void log_line(const std::string& line) {
  if (!g_logging) return;
  std::lock_guard lock(g_log_mutex);
  std::clog << "[vcd] " << line << '\n';
}

std::string_view to_string(GridObjective objective) {
  return objective == GridObjective::kSF1 ? "sf1" : "msf1";
}

GridObjective parse_grid_objective(std::string_view name) {
  if (name == "sf1") return GridObjective::kSF1;
  if (name == "msf1") return GridObjective::kMSF1;
  throw Error(ErrorCode::kConfig, "unknown objective '" + std::string(name) + "'");
}

void validate(const GridSpec& g) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, "grid: " + what); };
  if (!(g.threshold_step > 0.0)) fail("threshold step must be positive");
  if (!(g.threshold_lo <= g.threshold_hi)) fail("threshold range is empty");
  if (g.threshold_lo < -1.0 || g.threshold_hi > 1.0) fail("thresholds must lie in [-1, 1]");
  if (g.max_gaps.empty() || g.min_lengths.empty() || g.offset_bin_widths.empty() ||
      g.diag_penalties.empty() || g.band_radii.empty()) {
    fail("every structural list needs at least one value");
  }
}

std::vector<double> threshold_grid(const GridSpec& grid) {
  validate(grid);
  std::vector<double> out;
  const auto steps = static_cast<std::int64_t>(
      std::floor((grid.threshold_hi - grid.threshold_lo) / grid.threshold_step + 1e-9));
  for (std::int64_t k = 0; k <= steps; ++k) {
    const double raw = grid.threshold_lo + static_cast<double>(k) * grid.threshold_step;
    out.push_back(std::round(raw * 1e9) / 1e9);
  }
  return out;
}

std::vector<AlignParams> grid_settings(AlignMethod method, const GridSpec& grid) {
  const auto thresholds = threshold_grid(grid);
  const bool uses_gap = method != AlignMethod::kDynamicProgramming;
  const std::vector<int> gaps = uses_gap ? grid.max_gaps : std::vector<int>{grid.max_gaps.front()};
  const std::vector<int> bins = method == AlignMethod::kHoughVoting
                                    ? grid.offset_bin_widths
                                    : std::vector<int>{grid.offset_bin_widths.front()};
  const std::vector<double> penalties = method == AlignMethod::kDynamicProgramming
                                            ? grid.diag_penalties
                                            : std::vector<double>{grid.diag_penalties.front()};
  const std::vector<std::optional<int>> bands =
      method == AlignMethod::kDtw ? grid.band_radii
                                  : std::vector<std::optional<int>>{grid.band_radii.front()};
  std::vector<AlignParams> out;
  for (double t : thresholds) {
    for (int gap : gaps) {
      for (int len : grid.min_lengths) {
        for (int bin : bins) {
          for (double pen : penalties) {
            for (const auto& band : bands) {
              AlignParams p{method, t, gap, len, bin, pen, band};
              validate(p);
              out.push_back(p);
            }
          }
        }
      }
    }
  }
  return out;
}

std::vector<DetectionResult> align_pairs(std::span<const SimilarityMatrix> matrices,
                                         std::span<const PairAnnotation> pairs,
                                         const AlignParams& params, std::size_t workers) {
  if (matrices.size() != pairs.size()) {
    throw Error(ErrorCode::kValidation, "one similarity matrix per pair is required");
  }
  std::vector<DetectionResult> out(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t k) {
    out[k] = {pairs[k].query_id, pairs[k].ref_id, align(matrices[k], params), std::nullopt};
  });
  return out;
}

namespace {

double objective_of(std::span<const DetectionResult> detections,
                    std::span<const PairAnnotation> pairs, GridObjective objective,
                    MacroAggregation aggregation) {
  return objective == GridObjective::kSF1
             ? segment_level(detections, pairs).f1
             : macro_segment_level(detections, pairs, aggregation).f1;
}

}  // namespace

GridSearchResult grid_search(std::span<const SimilarityMatrix> matrices,
                             std::span<const PairAnnotation> pairs, AlignMethod method,
                             const GridSpec& grid, GridObjective objective,
                             MacroAggregation aggregation, std::size_t workers) {
  if (matrices.size() != pairs.size()) {
    throw Error(ErrorCode::kValidation, "one similarity matrix per pair is required");
  }
  const auto settings = grid_settings(method, grid);
  // Settings that differ only in min_length share one candidate pass, run at
  // the smallest min_length of the family and filtered per member.
  using Key = std::tuple<double, int, int, double, int>;
  std::map<Key, std::vector<std::size_t>> by_key;
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const auto& p = settings[k];
    by_key[{p.sim_threshold, p.max_gap, p.offset_bin_width, p.diag_penalty,
            p.band_radius.value_or(-1)}].push_back(k);
  }
  std::vector<std::vector<std::size_t>> families;
  families.reserve(by_key.size());
  for (auto& [key, members] : by_key) families.push_back(std::move(members));

  std::vector<double> scores(settings.size());
  parallel_for(families.size(), workers, [&](std::size_t f) {
    const auto& members = families[f];
    AlignParams base = settings[members.front()];
    for (auto k : members) base.min_length = std::min(base.min_length, settings[k].min_length);
    std::vector<std::vector<AlignCandidate>> candidates(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) candidates[i] = align_candidates(matrices[i], base);
    std::vector<DetectionResult> detections(pairs.size());
    for (auto k : members) {
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        detections[i] = {pairs[i].query_id, pairs[i].ref_id,
                         finalize_candidates(candidates[i], settings[k].min_length), std::nullopt};
      }
      scores[k] = objective_of(detections, pairs, objective, aggregation);
    }
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < settings.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return {settings[best], scores[best], settings.size()};
}

std::vector<SimilarityMatrix> pair_matrices(const Dataset& dataset,
                                            std::optional<ModificationMode> oracle,
                                            std::size_t workers) {
  std::vector<SimilarityMatrix> out(dataset.annotations.size());
  parallel_for(out.size(), workers, [&](std::size_t k) {
    const auto& pair = dataset.annotations[k];
    auto s = compute_similarity_matrix(dataset.video(pair.ref_id), dataset.video(pair.query_id));
    if (oracle && pair.is_positive()) s = modify_with_ground_truth(s, pair.segments, *oracle);
    out[k] = std::move(s);
  });
  return out;
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (c.methods.empty() && c.video_methods.empty()) fail("no methods configured");
  if (c.t_values.empty()) fail("t_values must not be empty");
  for (int t : c.t_values) {
    if (t < 0) fail("t values must be non-negative (0 = unedited dataset)");
  }
  if (!c.manifest && !c.synthetic) fail("config names neither a manifest nor a synthetic dataset");
  if (c.synthetic) validate(*c.synthetic);
  if (c.tune) {
    validate(c.grid);
  } else {
    for (auto m : c.methods) {
      auto it = c.params.find(m);
      if (it == c.params.end()) {
        fail("tuning disabled but no params for method " + std::string(to_string(m)));
      }
      if (it->second.method != m) fail("params for " + std::string(to_string(m)) + " name another method");
      validate(it->second);
    }
  }
  if (!(c.holdout_fraction >= 0.0 && c.holdout_fraction < 1.0)) {
    fail("holdout_fraction must lie in [0, 1)");
  }
  if (c.sm2g_window == 0) fail("sm2g_window must be positive");
}

namespace {

std::optional<ModificationMode> parse_oracle(const nlohmann::json& v) {
  if (v.is_null()) return std::nullopt;
  const auto s = v.get<std::string>();
  if (s == "diag") return ModificationMode::kDiagonalOnly;
  if (s == "zero") return ModificationMode::kZeroOutside;
  throw Error(ErrorCode::kConfig, "oracle must be \"diag\", \"zero\" or null");
}

ordered_json oracle_json(std::optional<ModificationMode> m) {
  if (!m) return nullptr;
  return *m == ModificationMode::kDiagonalOnly ? "diag" : "zero";
}

ordered_json params_json(const AlignParams& p) {
  return ordered_json::parse(serialize_align_params(p));
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  ExperimentConfig c;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    if (doc.contains("manifest") && !doc["manifest"].is_null()) {
      c.manifest = doc["manifest"].get<std::string>();
    }
    if (doc.contains("synthetic") && !doc["synthetic"].is_null()) {
      c.synthetic = parse_synthetic_config(doc["synthetic"].dump());
    }
    c.t_values = doc.value("t_values", c.t_values);
    if (doc.contains("methods")) {
      c.methods.clear();
      for (const auto& m : doc["methods"]) c.methods.push_back(parse_align_method(m.get<std::string>()));
    }
    if (doc.contains("video_methods")) {
      c.video_methods.clear();
      for (const auto& m : doc["video_methods"]) {
        c.video_methods.push_back(parse_video_scorer(m.get<std::string>()));
      }
    }
    if (doc.contains("aggregation")) {
      c.aggregation = parse_macro_aggregation(doc["aggregation"].get<std::string>());
    }
    if (doc.contains("oracle")) c.oracle = parse_oracle(doc["oracle"]);
    c.tune = doc.value("tune", c.tune);
    if (doc.contains("grid")) {
      const auto& g = doc["grid"];
      c.grid.threshold_lo = g.value("threshold_lo", c.grid.threshold_lo);
      c.grid.threshold_hi = g.value("threshold_hi", c.grid.threshold_hi);
      c.grid.threshold_step = g.value("step", c.grid.threshold_step);
      c.grid.max_gaps = g.value("max_gaps", c.grid.max_gaps);
      c.grid.min_lengths = g.value("min_lengths", c.grid.min_lengths);
      c.grid.offset_bin_widths = g.value("offset_bin_widths", c.grid.offset_bin_widths);
      c.grid.diag_penalties = g.value("diag_penalties", c.grid.diag_penalties);
      if (g.contains("band_radii")) {
        c.grid.band_radii.clear();
        for (const auto& b : g["band_radii"]) {
          c.grid.band_radii.push_back(b.is_null() ? std::nullopt : std::optional<int>(b.get<int>()));
        }
      }
    }
    if (doc.contains("objective")) c.objective = parse_grid_objective(doc["objective"].get<std::string>());
    if (doc.contains("tune_at_t") && !doc["tune_at_t"].is_null()) c.tune_at_t = doc["tune_at_t"].get<int>();
    c.holdout_fraction = doc.value("holdout_fraction", c.holdout_fraction);
    if (doc.contains("params")) {
      for (const auto& [name, value] : doc["params"].items()) {
        auto p = parse_align_params(value.dump());
        p.method = parse_align_method(name);
        c.params[p.method] = p;
      }
    }
    c.sm2g_window = doc.value("sm2g_window", c.sm2g_window);
    if (doc.contains("sm2g_chunk")) {
      const auto side = doc["sm2g_chunk"].get<std::string>();
      if (side == "reference") {
        c.sm2g_chunk = ChunkSide::kReference;
      } else if (side == "query") {
        c.sm2g_chunk = ChunkSide::kQuery;
      } else {
        throw Error(ErrorCode::kConfig, "sm2g_chunk must be reference or query");
      }
    }
    c.seed = doc.value("seed", c.seed);
    c.workers = doc.value("workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("experiment config: ") + e.what());
  }
  validate(c);
  return c;
}

std::string serialize_experiment_config(const ExperimentConfig& c) {
  ordered_json doc;
  doc["manifest"] = c.manifest ? ordered_json(c.manifest->string()) : ordered_json(nullptr);
  doc["synthetic"] = c.synthetic ? ordered_json::parse(serialize_synthetic_config(*c.synthetic))
                                 : ordered_json(nullptr);
  doc["t_values"] = c.t_values;
  doc["methods"] = ordered_json::array();
  for (auto m : c.methods) doc["methods"].push_back(std::string(to_string(m)));
  doc["video_methods"] = ordered_json::array();
  for (auto m : c.video_methods) doc["video_methods"].push_back(std::string(to_string(m)));
  doc["aggregation"] = std::string(to_string(c.aggregation));
  doc["oracle"] = oracle_json(c.oracle);
  doc["tune"] = c.tune;
  ordered_json g;
  g["threshold_lo"] = c.grid.threshold_lo;
  g["threshold_hi"] = c.grid.threshold_hi;
  g["step"] = c.grid.threshold_step;
  g["max_gaps"] = c.grid.max_gaps;
  g["min_lengths"] = c.grid.min_lengths;
  g["offset_bin_widths"] = c.grid.offset_bin_widths;
  g["diag_penalties"] = c.grid.diag_penalties;
  g["band_radii"] = ordered_json::array();
  for (const auto& b : c.grid.band_radii) {
    g["band_radii"].push_back(b ? ordered_json(*b) : ordered_json(nullptr));
  }
  doc["grid"] = g;
  doc["objective"] = std::string(to_string(c.objective));
  doc["tune_at_t"] = c.tune_at_t ? ordered_json(*c.tune_at_t) : ordered_json(nullptr);
  doc["holdout_fraction"] = c.holdout_fraction;
  ordered_json params = ordered_json::object();
  for (const auto& [m, p] : c.params) params[std::string(to_string(m))] = params_json(p);
  doc["params"] = params;
  doc["sm2g_window"] = c.sm2g_window;
  doc["sm2g_chunk"] = c.sm2g_chunk == ChunkSide::kReference ? "reference" : "query";
  doc["seed"] = c.seed;
  doc["workers"] = c.workers;
  return doc.dump(2) + "\n";
}

Dataset resolve_base_dataset(const ExperimentConfig& config) {
  if (config.manifest) return read_dataset(*config.manifest);
  return generate_synthetic(*config.synthetic);
}

Dataset dataset_at(const Dataset& base, int t, std::uint64_t seed) {
  if (t == 0) return base;
  return build_asymmetric_dataset(base, {t, seed}).dataset;
}

std::string t_label(int t) { return t == 0 ? "original" : std::to_string(t); }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Prepared {
  Dataset dataset;
  std::vector<SimilarityMatrix> matrices;
};

Prepared prepare(const Dataset& base, int t, const ExperimentConfig& config) {
  Prepared p{dataset_at(base, t, config.seed), {}};
  p.matrices = pair_matrices(p.dataset, config.oracle, config.workers);
  return p;
}

// Deterministic split of pair indices into (tuning, evaluation) sets.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
    std::size_t count, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> tune;
  std::vector<std::size_t> eval;
  for (std::size_t k = 0; k < count; ++k) {
    const bool to_tune = fraction > 0.0 &&
                         static_cast<double>(derive_seed(seed ^ 0x5bd1e995ULL, k) % 1000000) <
                             fraction * 1e6;
    (to_tune ? tune : eval).push_back(k);
  }
  if (fraction <= 0.0) tune = eval;
  return {tune, eval};
}

template <typename T>
std::vector<T> pick(std::span<const T> items, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto k : idx) out.push_back(items[k]);
  return out;
}

AlignParams tune_on(const Prepared& prepared, AlignMethod method, const ExperimentConfig& config,
                    const std::vector<std::size_t>& tune_idx) {
  const auto matrices = pick<SimilarityMatrix>(prepared.matrices, tune_idx);
  const auto pairs = pick<PairAnnotation>(prepared.dataset.annotations, tune_idx);
  const auto start = Clock::now();
  const auto result = grid_search(matrices, pairs, method, config.grid, config.objective,
                                  config.aggregation, config.workers);
  char buf[160];
  std::snprintf(buf, sizeof buf, "grid %s: %zu settings, best %s=%.4f at threshold %.2f (%.2fs)",
                std::string(to_string(method)).c_str(), result.evaluated,
                std::string(to_string(config.objective)).c_str(), result.objective,
                result.best.sim_threshold, seconds_since(start));
  log_line(buf);
  return result.best;
}

}  // namespace

SegmentExperimentResult run_segment_experiment(const ExperimentConfig& config, const Dataset& base) {
  validate(config);
  std::map<AlignMethod, AlignParams> fixed;
  if (config.tune && config.tune_at_t) {
    const auto prepared = prepare(base, *config.tune_at_t, config);
    const auto split = holdout_split(prepared.dataset.annotations.size(), config.holdout_fraction,
                                     config.seed);
    for (auto m : config.methods) fixed[m] = tune_on(prepared, m, config, split.first);
  } else if (!config.tune) {
    fixed = config.params;
  }

  const std::size_t nt = config.t_values.size();
  SegmentExperimentResult result;
  result.cells.resize(config.methods.size() * nt);
  for (std::size_t ti = 0; ti < nt; ++ti) {
    const int t = config.t_values[ti];
    const auto prepared = prepare(base, t, config);
    const auto [tune_idx, eval_idx] = holdout_split(prepared.dataset.annotations.size(),
                                                    config.holdout_fraction, config.seed);
    const auto eval_matrices = pick<SimilarityMatrix>(prepared.matrices, eval_idx);
    const auto eval_pairs = pick<PairAnnotation>(prepared.dataset.annotations, eval_idx);
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      const auto method = config.methods[mi];
      const auto start = Clock::now();
      const AlignParams params =
          fixed.contains(method) ? fixed.at(method) : tune_on(prepared, method, config, tune_idx);
      const auto detections = align_pairs(eval_matrices, eval_pairs, params, config.workers);
      const auto seg = segment_level(detections, eval_pairs);
      const auto frames = macro_segment_level(detections, eval_pairs, config.aggregation);
      result.cells[mi * nt + ti] = {method, t, config.oracle.has_value(), params,
                                    make_segment_report(seg, frames)};
      char buf[160];
      std::snprintf(buf, sizeof buf, "segment %s t=%s: SF1=%.4f mSF1=%.4f over %zu pairs (%.2fs)",
                    std::string(to_string(method)).c_str(), t_label(t).c_str(), seg.f1, frames.f1,
                    eval_pairs.size(), seconds_since(start));
      log_line(buf);
    }
  }
  return result;
}

SegmentExperimentResult run_segment_experiment(const ExperimentConfig& config) {
  validate(config);
  return run_segment_experiment(config, resolve_base_dataset(config));
}

VideoExperimentResult run_video_experiment(const ExperimentConfig& config, const Dataset& base,
                                           const std::optional<std::filesystem::path>& scores_dir) {
  validate(config);
  if (config.video_methods.empty()) throw Error(ErrorCode::kConfig, "no video-level methods configured");
  VideoExperimentResult result;
  for (int t : config.t_values) {
    const auto dataset = dataset_at(base, t, config.seed);
    std::vector<std::string> ids;
    std::map<std::string, VideoRole, std::less<>> roles;
    for (const auto& e : dataset.manifest) {
      ids.push_back(e.video_id);
      roles[e.video_id] = e.role;
    }
    std::set<std::pair<std::string, std::string>> copies;
    for (const auto& a : dataset.annotations) {
      if (a.is_positive()) {
        copies.insert({a.query_id, a.ref_id});
        copies.insert({a.ref_id, a.query_id});
      }
    }
    const auto pairs = enumerate_pairs(ids);

    // Orient each pair: the reference-role (else longer, else first) video
    // is the reference side.
    std::vector<std::pair<std::size_t, std::size_t>> oriented(pairs.size());
    std::vector<VideoPairLabel> labels(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      auto [a, b] = pairs[k];
      const auto& va = dataset.video(ids[a]);
      const auto& vb = dataset.video(ids[b]);
      const auto ra = roles.at(ids[a]);
      const auto rb = roles.at(ids[b]);
      const bool b_is_ref = ra != rb ? rb == VideoRole::kReference : vb.length() > va.length();
      if (b_is_ref) std::swap(a, b);
      oriented[k] = {a, b};
      labels[k] = {ids[b], ids[a], copies.contains({ids[a], ids[b]})};
    }
    std::size_t positives = 0;
    for (const auto& l : labels) positives += l.is_copy ? 1 : 0;
    if (positives == 0) {
      throw Error(ErrorCode::kUndefinedMetric,
                  "dataset at t=" + t_label(t) + " has no positive pairs; mAP is undefined");
    }
    if (scores_dir) {
      write_text_file(*scores_dir / ("labels_t" + t_label(t) + ".csv"), labels_csv(labels));
    }

    for (auto scorer : config.video_methods) {
      const auto start = Clock::now();
      std::vector<PairScore> scores(pairs.size());
      parallel_for(pairs.size(), config.workers, [&](std::size_t k) {
        const auto [ref, query] = oriented[k];
        scores[k] = {labels[k].query_id, labels[k].ref_id,
                     video_score(scorer, dataset.video(ids[ref]), dataset.video(ids[query]),
                                 config.sm2g_window, config.sm2g_chunk)};
      });
      const double map = micro_average_precision(scores, labels);
      result.cells.push_back({scorer, t, map, pairs.size(), positives});
      if (scores_dir) {
        const auto path = *scores_dir / ("scores_" + std::string(to_string(scorer)) + "_t" +
                                         t_label(t) + ".csv");
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
        out << "query_id,ref_id,method,score\n";
        char buf[40];
        for (const auto& s : scores) {
          std::snprintf(buf, sizeof buf, "%.9f", s.score);
          out << s.query_id << ',' << s.ref_id << ',' << to_string(scorer) << ',' << buf << '\n';
        }
      }
      char buf[160];
      std::snprintf(buf, sizeof buf, "video %s t=%s: mAP=%.4f over %zu pairs (%.2fs)",
                    std::string(to_string(scorer)).c_str(), t_label(t).c_str(), map, pairs.size(),
                    seconds_since(start));
      log_line(buf);
    }
  }
  // Scorer-major ordering to match the segment tables.
  std::stable_sort(result.cells.begin(), result.cells.end(),
                   [](const VideoCell& a, const VideoCell& b) { return a.scorer < b.scorer; });
  return result;
}

VideoExperimentResult run_video_experiment(const ExperimentConfig& config) {
  validate(config);
  return run_video_experiment(config, resolve_base_dataset(config));
}

namespace {

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string method_label(const SegmentCell& c) {
  return std::string(to_string(c.method)) + (c.oracle ? "*" : "");
}

}  // namespace

std::string segment_report_csv(const SegmentExperimentResult& result) {
  std::string out = "method,t,metric,value\n";
  for (const auto& c : result.cells) {
    const auto& r = c.report;
    for (const auto& [name, value] :
         {std::pair{"SR", r.sr}, std::pair{"SP", r.sp}, std::pair{"SF1", r.sf1},
          std::pair{"mSR", r.msr}, std::pair{"mSP", r.msp}, std::pair{"mSF1", r.msf1}}) {
      out += method_label(c) + "," + t_label(c.t) + "," + name + "," + fixed6(value.value_or(0.0)) + "\n";
    }
  }
  return out;
}

std::string segment_report_json(const SegmentExperimentResult& result) {
  ordered_json cells = ordered_json::array();
  for (const auto& c : result.cells) {
    const auto& r = c.report;
    ordered_json cell;
    cell["method"] = method_label(c);
    cell["t"] = t_label(c.t);
    cell["params"] = params_json(c.params);
    cell["sr"] = r.sr.value_or(0.0);
    cell["sp"] = r.sp.value_or(0.0);
    cell["sf1"] = r.sf1.value_or(0.0);
    cell["msr"] = r.msr.value_or(0.0);
    cell["msp"] = r.msp.value_or(0.0);
    cell["msf1"] = r.msf1.value_or(0.0);
    if (r.segment_counts) {
      const auto& s = *r.segment_counts;
      cell["counts"] = {{"ground_truth_segments", s.ground_truth_segments},
                        {"detected_ground_truth", s.detected_ground_truth},
                        {"detections", s.detections},
                        {"correct_detections", s.correct_detections}};
    }
    if (r.frame_counts) {
      const auto& f = *r.frame_counts;
      cell["frames"] = {
          {"query", {{"correct", f.query.correct}, {"ground_truth", f.query.ground_truth}, {"detected", f.query.detected}}},
          {"reference", {{"correct", f.reference.correct}, {"ground_truth", f.reference.ground_truth}, {"detected", f.reference.detected}}}};
    }
    cells.push_back(std::move(cell));
  }
  ordered_json doc;
  doc["level"] = "segment";
  doc["cells"] = std::move(cells);
  return doc.dump(2) + "\n";
}

std::string video_report_csv(const VideoExperimentResult& result) {
  std::string out = "method,t,metric,value\n";
  for (const auto& c : result.cells) {
    out += std::string(to_string(c.scorer)) + "," + t_label(c.t) + ",mAP," + fixed6(c.map) + "\n";
  }
  return out;
}

std::string video_report_json(const VideoExperimentResult& result) {
  ordered_json cells = ordered_json::array();
  for (const auto& c : result.cells) {
    ordered_json cell;
    cell["method"] = std::string(to_string(c.scorer));
    cell["t"] = t_label(c.t);
    cell["map"] = c.map;
    cell["pairs"] = c.pairs;
    cell["positives"] = c.positives;
    cells.push_back(std::move(cell));
  }
  ordered_json doc;
  doc["level"] = "video";
  doc["cells"] = std::move(cells);
  return doc.dump(2) + "\n";
}

std::string run_manifest_json(std::string_view command, const std::string& config_json,
                              std::uint64_t seed, std::span<const std::string> artifacts) {
  ordered_json doc;
  doc["tool"] = "vcd";
  doc["version"] = std::string(kToolkitVersion);
  doc["command"] = std::string(command);
  doc["seed"] = seed;
  doc["config"] = config_json.empty() ? ordered_json(nullptr) : ordered_json::parse(config_json);
  doc["artifacts"] = std::vector<std::string>(artifacts.begin(), artifacts.end());
  doc["versions"] = {{"compiler", __VERSION__},
                     {"cxx_standard", static_cast<long>(__cplusplus)},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  return doc.dump(2) + "\n";
}

}  // namespace vcd
