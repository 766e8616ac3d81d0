#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vcd/align.hpp"
#include "vcd/dataset.hpp"
#include "vcd/metrics.hpp"
#include "vcd/simmatrix.hpp"
#include "vcd/videolevel.hpp"

namespace vcd {

inline constexpr std::string_view kToolkitVersion = "1.0.0";

/// Worker count from VCD_WORKERS, else the hardware concurrency.
std::size_t default_worker_count();

/// Runs body(0..count-1) on up to `workers` threads. Each index is visited
/// exactly once; callers write results by index so scheduling cannot leak
/// into outputs. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

void set_logging(bool enabled);
void log_line(const std::string& line);

enum class GridObjective { kSF1, kMSF1 };
std::string_view to_string(GridObjective objective);
GridObjective parse_grid_objective(std::string_view name);

struct GridSpec {
  double threshold_lo = 0.0;
  double threshold_hi = 1.0;
  double threshold_step = 0.01;
  std::vector<int> max_gaps{1, 2, 3, 5};
  std::vector<int> min_lengths{1, 2, 3};
  std::vector<int> offset_bin_widths{1};
  std::vector<double> diag_penalties{0.5};
  std::vector<std::optional<int>> band_radii{std::nullopt};
};

void validate(const GridSpec& grid);

/// Threshold values lo, lo + step, ..., hi rounded to 1e-9 so that 0.3 is
/// the same double as the literal.
std::vector<double> threshold_grid(const GridSpec& grid);

/// Every parameter combination the method actually uses, ordered so that the
/// first maximum found is the tie-break winner: ascending threshold, then
/// max_gap, then min_length, then the method-specific lists.
std::vector<AlignParams> grid_settings(AlignMethod method, const GridSpec& grid);

struct GridSearchResult {
  AlignParams best;
  double objective = 0.0;
  std::size_t evaluated = 0;
};

/// Exhaustive search; pairs[k] is aligned on matrices[k].
GridSearchResult grid_search(std::span<const SimilarityMatrix> matrices,
                             std::span<const PairAnnotation> pairs, AlignMethod method,
                             const GridSpec& grid, GridObjective objective,
                             MacroAggregation aggregation, std::size_t workers);

/// Similarity matrix (reference rows x query columns) per annotated pair,
/// optionally with the ground-truth modification applied.
std::vector<SimilarityMatrix> pair_matrices(const Dataset& dataset,
                                            std::optional<ModificationMode> oracle,
                                            std::size_t workers);

std::vector<DetectionResult> align_pairs(std::span<const SimilarityMatrix> matrices,
                                         std::span<const PairAnnotation> pairs,
                                         const AlignParams& params, std::size_t workers);

struct ExperimentConfig {
  std::optional<std::filesystem::path> manifest;   // load a dataset from disk...
  std::optional<SyntheticConfig> synthetic;        // ...or generate one
  std::vector<int> t_values{10, 20, 30, 40, 50, 60};  // 0 = the unedited dataset
  std::vector<AlignMethod> methods{std::begin(kAllAlignMethods), std::end(kAllAlignMethods)};
  std::vector<VideoScorer> video_methods{std::begin(kAllVideoScorers), std::end(kAllVideoScorers)};
  MacroAggregation aggregation = MacroAggregation::kPooled;
  std::optional<ModificationMode> oracle;
  bool tune = true;
  GridSpec grid;
  GridObjective objective = GridObjective::kSF1;
  std::optional<int> tune_at_t;        // tune once at this t, reuse everywhere
  double holdout_fraction = 0.0;       // > 0: tune on a split, report on the rest
  std::map<AlignMethod, AlignParams> params;  // used when tune is false
  std::size_t sm2g_window = 10;
  ChunkSide sm2g_chunk = ChunkSide::kReference;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Throws kConfig on empty method/t lists, a bad grid, or missing params.
void validate(const ExperimentConfig& config);
ExperimentConfig parse_experiment_config(std::string_view json_text);
std::string serialize_experiment_config(const ExperimentConfig& config);

/// Loads or generates the base dataset named by the config.
Dataset resolve_base_dataset(const ExperimentConfig& config);

/// The dataset evaluated at `t` (the base itself when t is 0).
Dataset dataset_at(const Dataset& base, int t, std::uint64_t seed);

struct SegmentCell {
  AlignMethod method;
  int t = 0;
  bool oracle = false;
  AlignParams params;
  MetricsReport report;
};

struct SegmentExperimentResult {
  std::vector<SegmentCell> cells;  // method-major, then t in config order
};

SegmentExperimentResult run_segment_experiment(const ExperimentConfig& config, const Dataset& base);
SegmentExperimentResult run_segment_experiment(const ExperimentConfig& config);

struct VideoCell {
  VideoScorer scorer;
  int t = 0;
  double map = 0.0;
  std::size_t pairs = 0;
  std::size_t positives = 0;
};

struct VideoExperimentResult {
  std::vector<VideoCell> cells;
};

/// Scores every unordered video pair of each dataset. When `scores_dir` is
/// set, per-pair scores and labels are streamed there as CSV.
VideoExperimentResult run_video_experiment(const ExperimentConfig& config, const Dataset& base,
                                           const std::optional<std::filesystem::path>& scores_dir = std::nullopt);
VideoExperimentResult run_video_experiment(const ExperimentConfig& config);

/// Long-format CSV "method,t,metric,value"; t 0 is written as "original" and
/// oracle-modified runs carry a '*' after the method name.
std::string segment_report_csv(const SegmentExperimentResult& result);
std::string segment_report_json(const SegmentExperimentResult& result);
std::string video_report_csv(const VideoExperimentResult& result);
std::string video_report_json(const VideoExperimentResult& result);

/// Machine-readable record of what produced a run directory.
std::string run_manifest_json(std::string_view command, const std::string& config_json,
                              std::uint64_t seed, std::span<const std::string> artifacts);

std::string t_label(int t);

}  // namespace vcd
