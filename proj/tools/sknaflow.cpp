#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "sknaflow/error.hpp"
#include "sknaflow/log.hpp"
#include "sknaflow/pipeline.hpp"
#include "sknaflow/synth.hpp"

namespace {

namespace fs = std::filesystem;

sknaflow::RunConfig config_with_overrides(const std::string& path, const std::string& out, std::size_t workers) {
  auto config = sknaflow::load_run_config(path);
  if (!out.empty()) config.output_dir = fs::absolute(out);
  if (workers > 0) config.workers = workers;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  sknaflow::log::init_from_env();

  CLI::App app{"sknaflow: skin nerve activity indices from wideband skin recordings"};
  app.set_version_flag("--version", std::string(SKNAFLOW_VERSION));
  app.require_subcommand(1);

  std::string config_path, out_dir, spec_path, segments_path, channel, icc_form = "two_way_random_single";
  std::size_t workers = 0, recording_index = 0;
  double step_s = 0.01;

  auto* run = app.add_subcommand("run", "Full study: PSD report, index series, segment indices, evaluation");
  run->add_option("--config", config_path, "Run config or manifest (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic recording with bursts and its annotations");
  synth->add_option("--spec", spec_path, "Burst spec (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out_dir, "Output directory")->required();

  auto* psd = app.add_subcommand("psd", "Band-power report only");
  psd->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  psd->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  psd->add_option("--out", out_dir, "Output directory");

  auto* decompose = app.add_subcommand("decompose", "Time-frequency amplitude dump of the band decomposition");
  decompose->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  decompose->add_option("--recording", recording_index, "Index into config.recordings");
  decompose->add_option("--channel", channel, "Channel id (default: first channel)");
  decompose->add_option("--step-s", step_s, "Time step of the dump")->check(CLI::PositiveNumber);
  decompose->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  decompose->add_option("--out", out_dir, "Output directory");

  auto* evaluate = app.add_subcommand("evaluate", "Metrics from an existing per-segment index CSV");
  evaluate->add_option("--segments", segments_path, "Per-segment index CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", out_dir, "Evaluation CSV to write")->required();
  evaluate->add_option("--icc-form", icc_form, "two_way_random_single or two_way_mixed_single");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto summary = sknaflow::run_pipeline(config_with_overrides(config_path, out_dir, workers));
      for (const auto& p : summary.outputs) sknaflow::log::info("wrote " + p.string());
    } else if (*synth) {
      for (const auto& p : sknaflow::write_synth(sknaflow::load_synth_spec(spec_path), out_dir)) {
        sknaflow::log::info("wrote " + p.string());
      }
    } else if (*psd) {
      sknaflow::log::info("wrote " + sknaflow::run_psd_report(config_with_overrides(config_path, out_dir, workers)).string());
    } else if (*decompose) {
      const auto path = sknaflow::run_tfs_dump(config_with_overrides(config_path, out_dir, workers), recording_index,
                                               channel, step_s);
      sknaflow::log::info("wrote " + path.string());
    } else if (*evaluate) {
      const auto form = sknaflow::parse_icc_form(icc_form);
      const auto rows = sknaflow::evaluate_scores(sknaflow::load_segment_index_scores(segments_path), form);
      sknaflow::write_evaluation(rows, out_dir);
    }
  } catch (const sknaflow::Error& e) {
    std::fprintf(stderr, "sknaflow: error: %s\n", e.what());
    return sknaflow::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sknaflow: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
