// vcd: command-line front end for the copy-detection toolkit.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vcd/harness.hpp"

namespace fs = std::filesystem;
using namespace vcd;

namespace {

struct Common {
  std::size_t workers = default_worker_count();
  bool quiet = false;
};

void finish(const fs::path& out, std::string_view command, const std::string& config_json,
            std::uint64_t seed, std::vector<std::string> artifacts) {
  artifacts.push_back("run_manifest.json");
  write_text_file(out / "run_manifest.json", run_manifest_json(command, config_json, seed, artifacts));
  log_line("wrote " + out.string());
}

std::optional<ModificationMode> oracle_mode(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name == "diag") return ModificationMode::kDiagonalOnly;
  return ModificationMode::kZeroOutside;
}

std::string quoted_json(const std::string& key, const std::string& value) {
  return "{\"" + key + "\": \"" + value + "\"}";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segment- and video-level copy detection toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));
  Common common;
  app.add_option("--workers", common.workers, "Worker threads (default: VCD_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", common.quiet, "Suppress progress logging");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic planted-copy dataset");
  std::string synth_config;
  fs::path synth_out;
  synth->add_option("--config", synth_config, "Synthetic config JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output directory")->required();

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Rebuild a dataset with t-second queries");
  int build_t = 10;
  std::uint64_t build_seed = 0;
  fs::path build_in;
  std::optional<fs::path> build_annotations;
  fs::path build_out;
  build->add_option("--t", build_t, "Target query length in seconds")->required()->check(CLI::PositiveNumber);
  build->add_option("--seed", build_seed, "Random seed");
  build->add_option("--in", build_in, "Input manifest.csv")->required()->check(CLI::ExistingFile);
  build->add_option("--annotations", build_annotations, "Annotation JSON (default: next to the manifest)");
  build->add_option("--out", build_out, "Output directory")->required();

  // align
  auto* align_cmd = app.add_subcommand("align", "Run a temporal alignment method on every annotated pair");
  std::string align_method;
  std::optional<fs::path> align_params;
  std::string align_oracle;
  fs::path align_data;
  fs::path align_out;
  bool dump_matrix = false;
  align_cmd->add_option("--method", align_method, "hv, tn, dp or dtw")->required()
      ->check(CLI::IsMember({"hv", "tn", "dp", "dtw"}));
  align_cmd->add_option("--params", align_params, "AlignParams JSON")->check(CLI::ExistingFile);
  align_cmd->add_option("--oracle", align_oracle, "Apply the ground-truth modification")
      ->check(CLI::IsMember({"diag", "zero"}));
  align_cmd->add_option("--data", align_data, "Dataset manifest.csv")->required()->check(CLI::ExistingFile);
  align_cmd->add_option("--out", align_out, "Output directory")->required();
  align_cmd->add_flag("--dump-matrix", dump_matrix, "Write every similarity matrix as CSV");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score detections or video-level rankings");
  std::string eval_level;
  fs::path eval_data;
  std::optional<fs::path> eval_detections;
  std::vector<std::string> eval_scorers{"f2f", "g2g", "sm2g"};
  std::string eval_aggregation = "pooled";
  std::size_t eval_window = 10;
  fs::path eval_out;
  eval->add_option("--level", eval_level, "segment or video")->required()
      ->check(CLI::IsMember({"segment", "video"}));
  eval->add_option("--data", eval_data, "Dataset manifest.csv")->required()->check(CLI::ExistingFile);
  eval->add_option("--detections", eval_detections, "Detections JSON (segment level)")->check(CLI::ExistingFile);
  eval->add_option("--scorers", eval_scorers, "Video-level scorers")->delimiter(',');
  eval->add_option("--aggregation", eval_aggregation, "pooled or per-pair-mean")
      ->check(CLI::IsMember({"pooled", "per-pair-mean"}));
  eval->add_option("--window", eval_window, "SM2G window in seconds")->check(CLI::PositiveNumber);
  eval->add_option("--out", eval_out, "Output directory")->required();

  // grid-search
  auto* grid_cmd = app.add_subcommand("grid-search", "Tune alignment hyperparameters exhaustively");
  std::string grid_objective = "sf1";
  double grid_step = 0.01;
  std::vector<std::string> grid_methods{"hv", "tn", "dp", "dtw"};
  std::string grid_oracle;
  std::string grid_aggregation = "pooled";
  fs::path grid_data;
  fs::path grid_out;
  grid_cmd->add_option("--objective", grid_objective, "sf1 or msf1")->check(CLI::IsMember({"sf1", "msf1"}));
  grid_cmd->add_option("--step", grid_step, "Threshold step")->check(CLI::PositiveNumber);
  grid_cmd->add_option("--methods", grid_methods, "Methods to tune")->delimiter(',');
  grid_cmd->add_option("--oracle", grid_oracle, "Tune on modified matrices")->check(CLI::IsMember({"diag", "zero"}));
  grid_cmd->add_option("--aggregation", grid_aggregation, "pooled or per-pair-mean")
      ->check(CLI::IsMember({"pooled", "per-pair-mean"}));
  grid_cmd->add_option("--data", grid_data, "Dataset manifest.csv")->required()->check(CLI::ExistingFile);
  grid_cmd->add_option("--out", grid_out, "Output directory")->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Write length statistics for a dataset");
  fs::path stats_data;
  fs::path stats_out;
  stats->add_option("--data", stats_data, "Dataset manifest.csv")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", stats_out, "Output directory")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a full experiment from a config file");
  fs::path exp_config;
  fs::path exp_out;
  std::string exp_level = "both";
  bool exp_scores = false;
  exp->add_option("--config", exp_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  exp->add_option("--out", exp_out, "Output directory")->required();
  exp->add_option("--level", exp_level, "segment, video or both")->check(CLI::IsMember({"segment", "video", "both"}));
  exp->add_flag("--write-scores", exp_scores, "Stream per-pair video scores to CSV");

  CLI11_PARSE(app, argc, argv);
  set_logging(!common.quiet);

  try {
    if (*synth) {
      const auto cfg = parse_synthetic_config(read_text_file(synth_config));
      write_dataset(synth_out, generate_synthetic(cfg));
      finish(synth_out, "synth", serialize_synthetic_config(cfg), cfg.seed,
             {"manifest.csv", "annotations.json", "features/"});
    } else if (*build) {
      const auto input = read_dataset(build_in, build_annotations);
      const auto out = build_asymmetric_dataset(input, {build_t, build_seed});
      write_dataset(build_out, out.dataset);
      write_text_file(build_out / "excluded.csv", serialize_exclusions(out.excluded));
      const std::string cfg = "{\"t\": " + std::to_string(build_t) + ", \"seed\": " +
                              std::to_string(build_seed) + ", \"in\": \"" + build_in.string() + "\"}";
      finish(build_out, "build-dataset", cfg, build_seed,
             {"manifest.csv", "annotations.json", "features/", "excluded.csv"});
    } else if (*align_cmd) {
      AlignParams params;
      if (align_params) params = parse_align_params(read_text_file(*align_params));
      params.method = parse_align_method(align_method);
      validate(params);
      const auto data = read_dataset(align_data);
      const auto oracle = oracle_mode(align_oracle);
      const auto matrices = pair_matrices(data, oracle, common.workers);
      const auto detections = align_pairs(matrices, data.annotations, params, common.workers);
      save_detections(align_out / "detections.json", detections);
      std::vector<std::string> artifacts{"detections.json"};
      if (dump_matrix) {
        for (std::size_t k = 0; k < matrices.size(); ++k) {
          dump_matrix_csv(align_out / "matrices" / (data.annotations[k].key() + ".csv"), matrices[k]);
        }
        artifacts.push_back("matrices/");
      }
      finish(align_out, "align", serialize_align_params(params), 0, artifacts);
    } else if (*eval) {
      if (eval_level == "segment") {
        if (!eval_detections) throw Error(ErrorCode::kConfig, "--detections is required at segment level");
        const auto truth = read_dataset(eval_data).annotations;
        const auto detections = load_detections(*eval_detections);
        const auto aggregation = parse_macro_aggregation(eval_aggregation);
        const auto seg = segment_level(detections, truth);
        const auto frames = macro_segment_level(detections, truth, aggregation);
        std::string csv = "metric,value\n";
        std::string json = "{\n";
        const std::pair<const char*, double> rows[] = {
            {"SR", seg.recall},    {"SP", seg.precision},    {"SF1", seg.f1},
            {"mSR", frames.recall}, {"mSP", frames.precision}, {"mSF1", frames.f1}};
        for (std::size_t k = 0; k < std::size(rows); ++k) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "%s,%.6f\n", rows[k].first, rows[k].second);
          csv += buf;
          std::snprintf(buf, sizeof buf, "  \"%s\": %.9f%s\n", rows[k].first, rows[k].second,
                        k + 1 < std::size(rows) ? "," : "");
          json += buf;
        }
        json += "}\n";
        write_text_file(eval_out / "metrics.json", json);
        write_text_file(eval_out / "metrics.csv", csv);
        finish(eval_out, "evaluate", quoted_json("aggregation", eval_aggregation), 0,
               {"metrics.json", "metrics.csv"});
      } else {
        ExperimentConfig cfg;
        cfg.manifest = eval_data;
        cfg.t_values = {0};
        cfg.methods.clear();
        cfg.video_methods.clear();
        for (const auto& s : eval_scorers) cfg.video_methods.push_back(parse_video_scorer(s));
        cfg.sm2g_window = eval_window;
        cfg.workers = common.workers;
        const auto result = run_video_experiment(cfg, resolve_base_dataset(cfg), eval_out);
        write_text_file(eval_out / "video_report.csv", video_report_csv(result));
        write_text_file(eval_out / "video_report.json", video_report_json(result));
        finish(eval_out, "evaluate", serialize_experiment_config(cfg), 0,
               {"video_report.csv", "video_report.json", "labels_toriginal.csv", "scores_*.csv"});
      }
    } else if (*grid_cmd) {
      const auto data = read_dataset(grid_data);
      const auto matrices = pair_matrices(data, oracle_mode(grid_oracle), common.workers);
      GridSpec grid;
      grid.threshold_step = grid_step;
      std::vector<std::string> artifacts;
      for (const auto& name : grid_methods) {
        const auto method = parse_align_method(name);
        const auto r = grid_search(matrices, data.annotations, method, grid,
                                   parse_grid_objective(grid_objective),
                                   parse_macro_aggregation(grid_aggregation), common.workers);
        const auto file = "best_params_" + std::string(to_string(method)) + ".json";
        write_text_file(grid_out / file, serialize_align_params(r.best));
        artifacts.push_back(file);
        char line[128];
        std::snprintf(line, sizeof line, "%s %s=%.6f threshold=%.2f max_gap=%d min_length=%d\n",
                      name.c_str(), grid_objective.c_str(), r.objective, r.best.sim_threshold,
                      r.best.max_gap, r.best.min_length);
        std::cout << line;
      }
      finish(grid_out, "grid-search", quoted_json("objective", grid_objective), 0, artifacts);
    } else if (*stats) {
      const auto manifest = load_manifest(stats_data);
      const auto annotations = load_annotations(stats_data.parent_path() / "annotations.json");
      const auto s = length_stats(annotations, manifest);
      write_text_file(stats_out / "pair_lengths.csv", pair_lengths_csv(s));
      write_text_file(stats_out / "length_histogram.csv", length_histogram_csv(s));
      finish(stats_out, "stats", "", 0, {"pair_lengths.csv", "length_histogram.csv"});
    } else if (*exp) {
      auto cfg = parse_experiment_config(read_text_file(exp_config));
      if (app.get_option("--workers")->count() > 0 || std::getenv("VCD_WORKERS")) {
        cfg.workers = common.workers;
      }
      const auto base = resolve_base_dataset(cfg);
      std::vector<std::string> artifacts;
      if (exp_level != "video" && !cfg.methods.empty()) {
        const auto r = run_segment_experiment(cfg, base);
        write_text_file(exp_out / "segment_report.csv", segment_report_csv(r));
        write_text_file(exp_out / "segment_report.json", segment_report_json(r));
        artifacts.insert(artifacts.end(), {"segment_report.csv", "segment_report.json"});
      }
      if (exp_level != "segment" && !cfg.video_methods.empty()) {
        const auto r = run_video_experiment(cfg, base, exp_scores ? std::optional(exp_out / "scores") : std::nullopt);
        write_text_file(exp_out / "video_report.csv", video_report_csv(r));
        write_text_file(exp_out / "video_report.json", video_report_json(r));
        artifacts.insert(artifacts.end(), {"video_report.csv", "video_report.json"});
        if (exp_scores) artifacts.push_back("scores/");
      }
      finish(exp_out, "experiment", serialize_experiment_config(cfg), cfg.seed, artifacts);
    }
  } catch (const Error& e) {
    std::cerr << "vcd: error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vcd: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
