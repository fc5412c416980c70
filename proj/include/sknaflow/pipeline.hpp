#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sknaflow/band.hpp"
#include "sknaflow/error.hpp"
#include "sknaflow/indices.hpp"
#include "sknaflow/ingest.hpp"
#include "sknaflow/metrics.hpp"

namespace sknaflow {

struct RecordingInput {
  std::filesystem::path path;
  RecordingFormat format = RecordingFormat::csv;
  double wav_scale = 1.0;
  std::string subject;
  // Empty means the run-level annotation file.
  std::filesystem::path annotations;
};

struct PsdSettings {
  double window_s = 4.0;
  double overlap_frac = 0.5;
  double highpass_hz = 150.0;
  std::vector<FrequencyBand> bands;  // empty -> default_psd_bands()
  FrequencyBand score_band{150.0, 1000.0};
};

struct RunConfig {
  std::vector<RecordingInput> recordings;
  std::filesystem::path annotations;
  std::optional<std::filesystem::path> notch_list;
  std::vector<std::string> channels;  // empty -> every channel of each recording
  double target_fs = 4000.0;
  std::vector<BandSelection> selections = BandSelection::tvskna_presets();
  FrequencyBand iskna_band{500.0, 1000.0};
  double smoothing_s = 0.1;
  PsdSettings psd;
  SegmentWindows segment_windows;
  DecomposeOptions decomposition;
  NormalizationMode normalization = NormalizationMode::summed;
  IccForm icc_form = IccForm::two_way_random_single;
  double series_dump_step_s = 0.01;
  std::uint64_t seed = 0;

  // Execution settings; they do not change any output and are kept out of
  // the manifest.
  std::filesystem::path output_dir = "sknaflow_out";
  std::size_t workers = 1;
};

// Relative paths resolve against `base_dir`. A run manifest is accepted as
// well: its "config" object is used.
RunConfig parse_run_config(const nlohmann::json& document, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Config errors for missing files and out-of-range numbers.
void validate(const RunConfig& config);

// Fully resolved config, absolute paths, every default spelled out.
nlohmann::json to_json(const RunConfig& config);

// Output file names inside output_dir.
inline constexpr const char* kBandPowerFile = "band_power.csv";
inline constexpr const char* kIndexSeriesFile = "index_series.csv";
inline constexpr const char* kSegmentIndicesFile = "segment_indices.csv";
inline constexpr const char* kEvaluationFile = "evaluation.csv";
inline constexpr const char* kManifestFile = "manifest.json";

struct RunSummary {
  std::vector<std::filesystem::path> outputs;
};

RunSummary run_pipeline(const RunConfig& config);

// Band-power report only.
std::filesystem::path run_psd_report(const RunConfig& config);

// Time-frequency dump for one recording channel, amplitudes every `step_s`.
std::filesystem::path run_tfs_dump(const RunConfig& config, std::size_t recording_index, const std::string& channel,
                                   double step_s);

// One scalar per segment, ready for the baseline-versus-task comparison.
struct ScoreRecord {
  std::string subject;
  std::string channel;
  std::string method;
  std::string selection;
  std::string statistic;
  std::string condition;  // VM, ST, TG, low_pain or high_pain
  SegmentLabel label = SegmentLabel::baseline;
  double value = 0.0;
};

struct EvaluationRow {
  std::string channel;
  std::string method;
  std::string selection;
  std::string statistic;
  std::string condition;
  double j = 0.0;
  double bacc = 0.0;
  double auc = 0.0;
  double cv_avg = 0.0;
  std::optional<IccResult> icc;
};

// Task groups are compared with the baseline segments of their protocol
// (low_pain and high_pain against TG). ICC rows are subjects, columns the
// subject's baseline and task averages.
std::vector<EvaluationRow> evaluate_scores(const std::vector<ScoreRecord>& records, IccForm form);

// Reads a per-segment index CSV; segment_id is "<subject>/<n>".
std::vector<ScoreRecord> load_segment_index_scores(const std::filesystem::path& path);

void write_evaluation(const std::vector<EvaluationRow>& rows, const std::filesystem::path& path);

// Maps an error to the CLI exit status: 2 for usage, config and synth spec
// errors, 1 otherwise.
int exit_code_for(ErrorKind kind);

}  // namespace sknaflow
