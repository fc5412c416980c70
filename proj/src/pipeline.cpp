#include "sknaflow/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "sknaflow/filters.hpp"
#include "sknaflow/log.hpp"
#include "sknaflow/parallel.hpp"
#include "sknaflow/spectral.hpp"
#include "sknaflow/table.hpp"
#include "sknaflow/vfcdm.hpp"

#ifndef SKNAFLOW_VERSION
#define SKNAFLOW_VERSION "0.0.0"
#endif

namespace sknaflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kModule = "cli";

[[noreturn]] void config_error(const std::string& op, const std::string& detail) {
  throw Error(ErrorKind::config, kModule, op, detail);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error("parse_run_config", where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) config_error("parse_run_config", "unknown key '" + key + "' in " + where);
  }
}

// Value as it reads back from the CSV, so `evaluate` on the written segment
// file reproduces the run's evaluation exactly.
double as_written(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_cell(Cell{v}).c_str(), nullptr);
}

double number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error("parse_run_config", where + "." + key + " must be a number");
  return v.get<double>();
}

std::string text(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) config_error("parse_run_config", where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::size_t count(const json& obj, const char* key, std::size_t fallback, const std::string& where) {
  const double v = number(obj, key, static_cast<double>(fallback), where);
  if (!(v >= 0.0) || v != std::floor(v)) {
    config_error("parse_run_config", where + "." + key + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

FrequencyBand band_from(const json& v, const std::string& where) {
  check_keys(v, {"low_hz", "high_hz"}, where);
  if (!v.contains("low_hz") || !v.contains("high_hz")) config_error("parse_run_config", where + " needs low_hz and high_hz");
  return {number(v, "low_hz", 0.0, where), number(v, "high_hz", 0.0, where)};
}

json band_json(FrequencyBand b) { return json{{"low_hz", b.low_hz}, {"high_hz", b.high_hz}}; }

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return fs::absolute(path).lexically_normal();
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string band_name(FrequencyBand b) { return format_number(b.low_hz) + "-" + format_number(b.high_hz); }

std::vector<FrequencyBand> psd_bands(const RunConfig& c) {
  return c.psd.bands.empty() ? default_psd_bands() : c.psd.bands;
}

std::string condition_of(const SegmentAnnotation& s) {
  if (s.label == SegmentLabel::task) {
    if (auto group = s.pain_group()) return std::string(to_string(*group));
  }
  return std::string(to_string(s.condition));
}

// Segments that enter the analysis, with their position in the annotation file.
struct StudySegments {
  std::vector<SegmentAnnotation> segments;
  std::vector<std::size_t> ids;
};

StudySegments usable_segments(const std::vector<SegmentAnnotation>& all) {
  StudySegments out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& s = all[i];
    if (s.label == SegmentLabel::task && s.condition == Condition::TG && s.vas && !s.pain_group()) continue;
    out.segments.push_back(s);
    out.ids.push_back(i);
  }
  return out;
}

struct LoadedRecording {
  Recording recording;
  StudySegments study;
  std::vector<std::string> channels;
};

LoadedRecording load_input(const RunConfig& config, const RecordingInput& input) {
  LoadedRecording out;
  out.recording = load_recording(input.path, input.format, input.wav_scale);
  const fs::path& annotations = input.annotations.empty() ? config.annotations : input.annotations;
  out.study = usable_segments(load_annotations(annotations, out.recording.duration_s()));
  out.channels = config.channels.empty() ? out.recording.channel_ids() : config.channels;
  for (const auto& ch : out.channels) out.recording.channel(ch);
  return out;
}

NotchList load_notches(const RunConfig& config) {
  if (!config.notch_list) return {};
  auto notches = load_notch_list(*config.notch_list);
  validate(notches, config.target_fs);
  return notches;
}

struct PsdOutput {
  std::vector<Row> rows;
  std::vector<ScoreRecord> scores;
};

PsdOutput psd_for_channel(const RunConfig& config, std::span<const double> x, const std::string& subject,
                          const std::string& channel, const StudySegments& study) {
  const double fs = config.target_fs;
  const auto bands = psd_bands(config);
  const auto taps = design_fir(FilterSpec::highpass(config.psd.highpass_hz), fs);
  const auto hp = apply_filter(x, taps, true);

  const std::size_t n = study.segments.size();
  std::vector<std::vector<BandPowerRow>> powers(n);
  std::vector<SegmentBandScore> scores(n);
  parallel_for(n, config.workers, [&](std::size_t i) {
    const auto w = segment_window(study.segments[i], study.ids[i], fs, hp.size(), config.segment_windows, "run_psd");
    const auto psd = welch_psd(std::span<const double>(hp).subspan(w.first, w.count), fs, config.psd.window_s,
                               config.psd.overlap_frac);
    powers[i] = band_power(psd, bands);
    scores[i] = segment_band_score(psd, config.psd.score_band, bands);
  });

  PsdOutput out;
  const std::string score_name = band_name(config.psd.score_band);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& seg = study.segments[i];
    const std::string id = subject + "/" + std::to_string(study.ids[i]);
    for (const auto& p : powers[i]) {
      out.rows.push_back(Row{{"channel", channel},
                             {"condition", condition_of(seg)},
                             {"segment_id", id},
                             {"band_low_hz", p.band.low_hz},
                             {"band_high_hz", p.band.high_hz},
                             {"absolute_power", p.absolute_power},
                             {"normalized_pct", p.normalized_power_pct}});
    }
    ScoreRecord r{subject, channel, "psd", "absolute_" + score_name, "band_power", condition_of(seg), seg.label,
                  scores[i].absolute};
    out.scores.push_back(r);
    r.selection = "normalized_" + score_name;
    r.value = scores[i].normalized_pct;
    out.scores.push_back(r);
  }
  return out;
}

const std::vector<std::string> kBandPowerColumns{"channel",      "condition",      "segment_id",    "band_low_hz",
                                                 "band_high_hz", "absolute_power", "normalized_pct"};
const std::vector<std::string> kSegmentColumns{"channel", "method", "selection", "condition", "label",
                                               "segment_id", "max", "mean", "sd"};
const std::vector<std::string> kEvaluationColumns{"channel", "method", "selection", "statistic", "condition", "J",
                                                  "BACC", "AUC", "CV_baseline_task_avg", "ICC", "ICC_label"};

class SeriesWriter {
 public:
  explicit SeriesWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorKind::io, kModule, "run_pipeline", "cannot open " + path.string());
    out_ << "subject,channel,method,selection,t_s,value\n";
  }

  void write(const std::string& subject, const IndexSeries& s, double step_s) {
    const auto step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(step_s * s.fs)));
    const std::string prefix = subject + "," + s.channel_id + "," + std::string(to_string(s.method)) + "," +
                               s.selection + ",";
    char buf[96];
    for (std::size_t i = 0; i < s.values.size(); i += step) {
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", static_cast<double>(i) / s.fs, s.values[i]);
      out_ << prefix << buf;
    }
  }

  void close() {
    out_.close();
    if (!out_) throw Error(ErrorKind::io, kModule, "run_pipeline", "write failed for " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::io, kModule, "run_pipeline", "cannot create output directory " + dir.string());
  }
}

}  // namespace

RunConfig parse_run_config(const json& document, const fs::path& base_dir) {
  const std::string op = "parse_run_config";
  const json& doc = document.is_object() && document.contains("config") ? document.at("config") : document;
  check_keys(doc,
             {"recordings", "annotations", "notch_list", "channels", "target_fs", "selections", "iskna_band",
              "smoothing_s", "psd", "segment_windows", "decomposition", "normalization", "icc_form",
              "series_dump_step_s", "seed", "output_dir", "workers"},
             "config");

  RunConfig c;
  if (!doc.contains("recordings") || !doc.at("recordings").is_array() || doc.at("recordings").empty()) {
    config_error(op, "config.recordings must be a non-empty array");
  }
  std::size_t index = 0;
  for (const auto& r : doc.at("recordings")) {
    const std::string where = "recordings[" + std::to_string(index++) + "]";
    check_keys(r, {"path", "format", "wav_scale", "subject", "annotations"}, where);
    if (!r.contains("path")) config_error(op, where + ".path is required");
    RecordingInput in;
    in.path = resolve(base_dir, text(r, "path", "", where));
    const std::string ext = in.path.extension().string();
    const std::string fmt = text(r, "format", ext == ".wav" || ext == ".WAV" ? "wav" : "csv", where);
    try {
      in.format = parse_recording_format(fmt);
    } catch (const Error& e) {
      config_error(op, where + ".format: " + e.detail());
    }
    in.wav_scale = number(r, "wav_scale", 1.0, where);
    in.subject = text(r, "subject", in.path.stem().string(), where);
    if (r.contains("annotations")) in.annotations = resolve(base_dir, text(r, "annotations", "", where));
    c.recordings.push_back(std::move(in));
  }
  if (doc.contains("annotations")) c.annotations = resolve(base_dir, text(doc, "annotations", "", "config"));
  if (doc.contains("notch_list") && !doc.at("notch_list").is_null()) {
    c.notch_list = resolve(base_dir, text(doc, "notch_list", "", "config"));
  }
  if (doc.contains("channels")) {
    const auto& ch = doc.at("channels");
    if (!ch.is_array()) config_error(op, "config.channels must be an array of strings");
    for (const auto& v : ch) {
      if (!v.is_string()) config_error(op, "config.channels must be an array of strings");
      c.channels.push_back(v.get<std::string>());
    }
  }
  c.target_fs = number(doc, "target_fs", c.target_fs, "config");
  if (doc.contains("selections")) {
    const auto& sels = doc.at("selections");
    if (!sels.is_array()) config_error(op, "config.selections must be an array");
    c.selections.clear();
    for (const auto& s : sels) {
      check_keys(s, {"name", "low_hz", "high_hz"}, "selection");
      c.selections.push_back({text(s, "name", "", "selection"), number(s, "low_hz", 0.0, "selection"),
                              number(s, "high_hz", 0.0, "selection")});
    }
  }
  if (doc.contains("iskna_band")) c.iskna_band = band_from(doc.at("iskna_band"), "config.iskna_band");
  c.smoothing_s = number(doc, "smoothing_s", c.smoothing_s, "config");

  if (doc.contains("psd")) {
    const auto& p = doc.at("psd");
    check_keys(p, {"window_s", "overlap_frac", "highpass_hz", "bands", "score_band"}, "psd");
    c.psd.window_s = number(p, "window_s", c.psd.window_s, "psd");
    c.psd.overlap_frac = number(p, "overlap_frac", c.psd.overlap_frac, "psd");
    c.psd.highpass_hz = number(p, "highpass_hz", c.psd.highpass_hz, "psd");
    if (p.contains("bands")) {
      if (!p.at("bands").is_array()) config_error(op, "psd.bands must be an array");
      for (const auto& b : p.at("bands")) c.psd.bands.push_back(band_from(b, "psd.bands"));
    }
    if (p.contains("score_band")) c.psd.score_band = band_from(p.at("score_band"), "psd.score_band");
  }
  if (doc.contains("segment_windows")) {
    const auto& w = doc.at("segment_windows");
    check_keys(w, {"VM", "ST", "TG", "offset_s"}, "segment_windows");
    c.segment_windows.vm_s = number(w, "VM", c.segment_windows.vm_s, "segment_windows");
    c.segment_windows.st_s = number(w, "ST", c.segment_windows.st_s, "segment_windows");
    c.segment_windows.tg_s = number(w, "TG", c.segment_windows.tg_s, "segment_windows");
    c.segment_windows.offset_s = number(w, "offset_s", c.segment_windows.offset_s, "segment_windows");
  }
  if (doc.contains("decomposition")) {
    const auto& d = doc.at("decomposition");
    check_keys(d, {"n_components", "band_width_hz", "lpf_order"}, "decomposition");
    c.decomposition.n_components = count(d, "n_components", c.decomposition.n_components, "decomposition");
    c.decomposition.band_width_hz = number(d, "band_width_hz", c.decomposition.band_width_hz, "decomposition");
    c.decomposition.lpf_order = number(d, "lpf_order", c.decomposition.lpf_order, "decomposition");
  }
  const std::string norm = text(doc, "normalization", "summed", "config");
  if (norm == "summed") c.normalization = NormalizationMode::summed;
  else if (norm == "per_component") c.normalization = NormalizationMode::per_component;
  else config_error(op, "config.normalization must be 'summed' or 'per_component', got '" + norm + "'");
  try {
    c.icc_form = parse_icc_form(text(doc, "icc_form", std::string(to_string(c.icc_form)), "config"));
  } catch (const Error& e) {
    config_error(op, e.detail());
  }
  c.series_dump_step_s = number(doc, "series_dump_step_s", c.series_dump_step_s, "config");
  c.seed = count(doc, "seed", 0, "config");
  if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, text(doc, "output_dir", "", "config"));
  c.workers = count(doc, "workers", c.workers, "config");
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) config_error("load_run_config", "config file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(read_text_file(path, kModule, "load_run_config"));
  } catch (const json::parse_error& e) {
    config_error("load_run_config", path.string() + ": " + e.what());
  }
  return parse_run_config(doc, fs::absolute(path).parent_path());
}

void validate(const RunConfig& c) {
  const std::string op = "validate_config";
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) config_error(op, what);
  };
  auto file_exists = [&](const fs::path& p, const std::string& what) {
    require(!p.empty(), what + " path is missing");
    require(fs::is_regular_file(p), what + " not found: " + p.string());
  };

  require(!c.recordings.empty(), "no recordings");
  std::set<std::string> subjects;
  for (const auto& r : c.recordings) {
    file_exists(r.path, "recording");
    file_exists(r.annotations.empty() ? c.annotations : r.annotations, "annotation file");
    require(std::isfinite(r.wav_scale) && r.wav_scale != 0.0, "wav_scale must be finite and non-zero");
    require(!r.subject.empty(), "empty subject name for " + r.path.string());
    require(r.subject.find('/') == std::string::npos, "subject '" + r.subject + "' must not contain '/'");
    require(subjects.insert(r.subject).second, "duplicate subject '" + r.subject + "'");
  }
  if (c.notch_list) file_exists(*c.notch_list, "notch list");

  const double nyquist = c.target_fs / 2.0;
  require(c.target_fs > 0.0 && std::isfinite(c.target_fs), "target_fs must be positive");
  require(c.smoothing_s > 0.0, "smoothing_s must be positive");
  require(c.series_dump_step_s > 0.0, "series_dump_step_s must be positive");
  require(c.workers >= 1, "workers must be >= 1");

  require(c.psd.window_s > 0.0, "psd.window_s must be positive");
  require(c.psd.overlap_frac >= 0.0 && c.psd.overlap_frac < 1.0, "psd.overlap_frac must lie in [0, 1)");
  require(c.psd.highpass_hz > 0.0 && c.psd.highpass_hz < nyquist, "psd.highpass_hz must lie in (0, target_fs/2)");
  for (const auto& b : psd_bands(c)) {
    require(b.low_hz >= 0.0 && b.low_hz < b.high_hz && b.high_hz <= nyquist,
            "psd band " + band_name(b) + " must satisfy 0 <= low < high <= target_fs/2");
  }
  const auto& sb = c.psd.score_band;
  require(sb.low_hz >= 0.0 && sb.low_hz < sb.high_hz && sb.high_hz <= nyquist, "psd.score_band out of range");

  const auto& w = c.segment_windows;
  require(w.vm_s > 0.0 && w.st_s > 0.0 && w.tg_s > 0.0, "segment windows must be positive");
  require(w.offset_s >= 0.0, "segment_windows.offset_s must be >= 0");

  const auto& d = c.decomposition;
  require(d.n_components >= 1, "decomposition.n_components must be >= 1");
  require(d.band_width_hz > 0.0, "decomposition.band_width_hz must be positive");
  require(d.band_width_hz * static_cast<double>(d.n_components) < nyquist,
          "decomposition covers " + format_number(d.band_width_hz * static_cast<double>(d.n_components)) +
              " Hz, which must stay below target_fs/2");
  require(d.lpf_order >= 0.0, "decomposition.lpf_order must be >= 0");

  require(!c.selections.empty(), "at least one band selection is required");
  std::set<std::string> names;
  for (const auto& s : c.selections) {
    require(!s.name.empty(), "selection names must be non-empty");
    require(names.insert(s.name).second, "duplicate selection '" + s.name + "'");
    require(s.low_hz >= 0.0 && s.low_hz < s.high_hz, "selection '" + s.name + "' needs 0 <= low_hz < high_hz");
  }
  require(c.iskna_band.low_hz > 0.0 && c.iskna_band.low_hz < c.iskna_band.high_hz && c.iskna_band.high_hz < nyquist,
          "iskna_band must satisfy 0 < low < high < target_fs/2");
}

json to_json(const RunConfig& c) {
  json recordings = json::array();
  for (const auto& r : c.recordings) {
    json item{{"path", r.path.string()},
              {"format", std::string(to_string(r.format))},
              {"wav_scale", r.wav_scale},
              {"subject", r.subject}};
    if (!r.annotations.empty()) item["annotations"] = r.annotations.string();
    recordings.push_back(std::move(item));
  }
  json selections = json::array();
  for (const auto& s : c.selections) selections.push_back({{"name", s.name}, {"low_hz", s.low_hz}, {"high_hz", s.high_hz}});
  json bands = json::array();
  for (const auto& b : psd_bands(c)) bands.push_back(band_json(b));

  json out;
  out["recordings"] = std::move(recordings);
  out["annotations"] = c.annotations.string();
  out["notch_list"] = c.notch_list ? json(c.notch_list->string()) : json(nullptr);
  out["channels"] = c.channels;
  out["target_fs"] = c.target_fs;
  out["selections"] = std::move(selections);
  out["iskna_band"] = band_json(c.iskna_band);
  out["smoothing_s"] = c.smoothing_s;
  out["psd"] = {{"window_s", c.psd.window_s},
                {"overlap_frac", c.psd.overlap_frac},
                {"highpass_hz", c.psd.highpass_hz},
                {"bands", std::move(bands)},
                {"score_band", band_json(c.psd.score_band)}};
  out["segment_windows"] = {{"VM", c.segment_windows.vm_s},
                            {"ST", c.segment_windows.st_s},
                            {"TG", c.segment_windows.tg_s},
                            {"offset_s", c.segment_windows.offset_s}};
  out["decomposition"] = {{"n_components", c.decomposition.n_components},
                          {"band_width_hz", c.decomposition.band_width_hz},
                          {"lpf_order", c.decomposition.lpf_order}};
  out["normalization"] = c.normalization == NormalizationMode::summed ? "summed" : "per_component";
  out["icc_form"] = std::string(to_string(c.icc_form));
  out["series_dump_step_s"] = c.series_dump_step_s;
  out["seed"] = c.seed;
  return out;
}

RunSummary run_pipeline(const RunConfig& config) {
  validate(config);
  prepare_output_dir(config.output_dir);
  const NotchList notches = load_notches(config);
  const double fs = config.target_fs;

  TvsknaOptions opts;
  opts.smoothing_s = config.smoothing_s;
  opts.normalization = config.normalization;
  opts.decomposition = config.decomposition;
  opts.decomposition.workers = config.workers;

  std::vector<Row> band_rows;
  std::vector<Row> segment_rows;
  std::vector<ScoreRecord> scores;
  SeriesWriter series_out(config.output_dir / kIndexSeriesFile);

  for (const auto& input : config.recordings) {
    log::info("processing " + input.path.string() + " (subject " + input.subject + ")");
    const LoadedRecording loaded = load_input(config, input);
    const auto& study = loaded.study;

    for (const auto& channel : loaded.channels) {
      const auto x = preprocess(loaded.recording, channel, notches, fs);

      auto psd = psd_for_channel(config, x, input.subject, channel, study);
      std::move(psd.rows.begin(), psd.rows.end(), std::back_inserter(band_rows));
      std::move(psd.scores.begin(), psd.scores.end(), std::back_inserter(scores));

      auto series = compute_tvskna_set(x, fs, config.selections, opts);
      series.push_back(compute_iskna(x, fs, config.iskna_band, config.smoothing_s));

      for (auto& s : series) {
        s.channel_id = channel;
        series_out.write(input.subject, s, config.series_dump_step_s);
        const auto sets = extract_segment_indices(s, study.segments, config.segment_windows);
        for (const auto& set : sets) {
          const auto& seg = set.segment;
          const std::string method(to_string(s.method));
          const std::string condition = condition_of(seg);
          segment_rows.push_back(Row{{"channel", channel},
                                     {"method", method},
                                     {"selection", s.selection},
                                     {"condition", condition},
                                     {"label", std::string(to_string(seg.label))},
                                     {"segment_id", input.subject + "/" + std::to_string(study.ids[set.segment_index])},
                                     {"max", set.max},
                                     {"mean", set.mean},
                                     {"sd", set.sd}});
          for (const auto& [stat, value] : {std::pair{"max", set.max}, {"mean", set.mean}, {"sd", set.sd}}) {
            scores.push_back({input.subject, channel, method, s.selection, stat, condition, seg.label, as_written(value)});
          }
        }
      }
    }
  }
  series_out.close();

  RunSummary summary;
  const auto out = [&](const char* name) {
    summary.outputs.push_back(config.output_dir / name);
    return summary.outputs.back();
  };
  write_table(band_rows, out(kBandPowerFile), TableFormat::csv, kBandPowerColumns);
  summary.outputs.push_back(config.output_dir / kIndexSeriesFile);
  write_table(segment_rows, out(kSegmentIndicesFile), TableFormat::csv, kSegmentColumns);
  write_evaluation(evaluate_scores(scores, config.icc_form), out(kEvaluationFile));

  json manifest;
  manifest["tool"] = "sknaflow";
  manifest["version"] = SKNAFLOW_VERSION;
  manifest["config"] = to_json(config);
  manifest["outputs"] = {kBandPowerFile, kIndexSeriesFile, kSegmentIndicesFile, kEvaluationFile};
  const fs::path manifest_path = out(kManifestFile);
  std::ofstream m(manifest_path, std::ios::binary | std::ios::trunc);
  m << manifest.dump(2) << "\n";
  if (!m) throw Error(ErrorKind::io, kModule, "run_pipeline", "write failed for " + manifest_path.string());
  return summary;
}

fs::path run_psd_report(const RunConfig& config) {
  validate(config);
  prepare_output_dir(config.output_dir);
  const NotchList notches = load_notches(config);
  std::vector<Row> rows;
  for (const auto& input : config.recordings) {
    const LoadedRecording loaded = load_input(config, input);
    for (const auto& channel : loaded.channels) {
      const auto x = preprocess(loaded.recording, channel, notches, config.target_fs);
      auto psd = psd_for_channel(config, x, input.subject, channel, loaded.study);
      std::move(psd.rows.begin(), psd.rows.end(), std::back_inserter(rows));
    }
  }
  const fs::path path = config.output_dir / kBandPowerFile;
  write_table(rows, path, TableFormat::csv, kBandPowerColumns);
  return path;
}

fs::path run_tfs_dump(const RunConfig& config, std::size_t recording_index, const std::string& channel,
                      double step_s) {
  validate(config);
  if (recording_index >= config.recordings.size()) {
    config_error("run_tfs_dump", "recording index " + std::to_string(recording_index) + " out of range");
  }
  if (!(step_s > 0.0)) config_error("run_tfs_dump", "step must be positive");
  prepare_output_dir(config.output_dir);
  const auto& input = config.recordings[recording_index];
  const Recording rec = load_recording(input.path, input.format, input.wav_scale);
  const std::string ch = channel.empty() ? rec.channel_ids().front() : channel;
  const auto x = preprocess(rec, ch, load_notches(config), config.target_fs);

  DecomposeOptions opts = config.decomposition;
  opts.workers = config.workers;
  const Decomposer decomposer(x, config.target_fs, opts);
  const auto step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(step_s * config.target_fs)));
  const std::size_t rows = (decomposer.length() + step - 1) / step;

  // Only the decimated amplitudes are kept.
  std::vector<std::vector<double>> amp(decomposer.size(), std::vector<double>(rows));
  parallel_for(decomposer.size(), config.workers, [&](std::size_t k) {
    const auto c = decomposer.component(k);
    for (std::size_t r = 0; r < rows; ++r) amp[k][r] = c.amplitude[r * step];
  });

  const fs::path path = config.output_dir / ("tfs_" + input.subject + "_" + ch + ".csv");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, kModule, "run_tfs_dump", "cannot open " + path.string());
  out << "t_s,band_low_hz,band_high_hz,amplitude\n";
  char buf[128];
  for (std::size_t r = 0; r < rows; ++r) {
    const double t = static_cast<double>(r * step) / config.target_fs;
    for (std::size_t k = 0; k < decomposer.size(); ++k) {
      const auto b = decomposer.band(k);
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", t, b.low_hz, b.high_hz, amp[k][r]);
      out << buf;
    }
  }
  if (!out) throw Error(ErrorKind::io, kModule, "run_tfs_dump", "write failed for " + path.string());
  return path;
}

std::vector<EvaluationRow> evaluate_scores(const std::vector<ScoreRecord>& records, IccForm form) {
  using Key = std::array<std::string, 4>;
  std::vector<Key> keys;
  std::map<Key, std::vector<const ScoreRecord*>> by_key;
  std::vector<std::string> task_conditions;
  for (const auto& r : records) {
    const Key key{r.channel, r.method, r.selection, r.statistic};
    auto [it, inserted] = by_key.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
    if (r.label == SegmentLabel::task &&
        std::find(task_conditions.begin(), task_conditions.end(), r.condition) == task_conditions.end()) {
      task_conditions.push_back(r.condition);
    }
  }

  std::vector<EvaluationRow> rows;
  std::set<std::string> warned;
  for (const auto& key : keys) {
    const auto& group = by_key.at(key);
    for (const auto& condition : task_conditions) {
      const std::string base = condition == "low_pain" || condition == "high_pain" ? "TG" : condition;
      LabeledScores s;
      std::vector<std::string> subjects;
      std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_subject;
      for (const ScoreRecord* r : group) {
        const bool neg = r->label == SegmentLabel::baseline && r->condition == base;
        const bool pos = r->label == SegmentLabel::task && r->condition == condition;
        if (!neg && !pos) continue;
        (neg ? s.negatives : s.positives).push_back(r->value);
        auto [it, inserted] = per_subject.try_emplace(r->subject);
        if (inserted) subjects.push_back(r->subject);
        (neg ? it->second.first : it->second.second).push_back(r->value);
      }
      if (s.negatives.empty() || s.positives.empty()) {
        if (warned.insert(condition).second) {
          log::warn("condition " + condition + " has no " + (s.negatives.empty() ? "baseline " + base : "task") +
                    " segments; skipped");
        }
        continue;
      }

      EvaluationRow row;
      row.channel = key[0];
      row.method = key[1];
      row.selection = key[2];
      row.statistic = key[3];
      row.condition = condition;
      const auto y = youden_optimal(s);
      row.j = y.j;
      row.bacc = y.bacc;
      row.auc = auc(roc(s));
      try {
        row.cv_avg = 0.5 * (coefficient_of_variation(s.negatives) + coefficient_of_variation(s.positives));
      } catch (const Error&) {
        row.cv_avg = std::nan("");
      }

      ReliabilityMatrix m;
      m.cols = 2;
      for (const auto& subject : subjects) {
        const auto& [neg, pos] = per_subject.at(subject);
        if (neg.empty() || pos.empty()) continue;
        m.values.push_back(mean_of(neg));
        m.values.push_back(mean_of(pos));
        ++m.rows;
      }
      if (m.rows >= 2) {
        try {
          row.icc = icc(m, form);
        } catch (const Error& e) {
          log::warn("ICC unavailable for " + key[1] + " " + key[2] + " " + key[3] + " " + condition + ": " + e.detail());
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<ScoreRecord> load_segment_index_scores(const fs::path& path) {
  if (!fs::exists(path)) config_error("evaluate", "segment index file not found: " + path.string());
  const TextTable table = read_csv(path);
  std::vector<std::size_t> col;
  for (const auto& name : kSegmentColumns) col.push_back(table.column_index(name));

  std::vector<ScoreRecord> out;
  std::size_t line = 1;
  for (const auto& row : table.rows) {
    ++line;
    const std::string where = path.string() + " line " + std::to_string(line);
    const std::string& id = row[col[5]];
    const auto slash = id.rfind('/');
    ScoreRecord base;
    base.subject = slash == std::string::npos ? "" : id.substr(0, slash);
    base.channel = row[col[0]];
    base.method = row[col[1]];
    base.selection = row[col[2]];
    base.condition = row[col[3]];
    try {
      base.label = parse_segment_label(row[col[4]]);
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, kModule, "evaluate", where + ": " + e.detail());
    }
    for (std::size_t k = 6; k < 9; ++k) {
      ScoreRecord r = base;
      r.statistic = kSegmentColumns[k];
      char* end = nullptr;
      r.value = std::strtod(row[col[k]].c_str(), &end);
      if (row[col[k]].empty() || *end != '\0') {
        throw Error(ErrorKind::parse, kModule, "evaluate", where + ": malformed " + kSegmentColumns[k]);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

void write_evaluation(const std::vector<EvaluationRow>& rows, const fs::path& path) {
  std::vector<Row> table;
  for (const auto& r : rows) {
    table.push_back(Row{{"channel", r.channel},
                        {"method", r.method},
                        {"selection", r.selection},
                        {"statistic", r.statistic},
                        {"condition", r.condition},
                        {"J", r.j},
                        {"BACC", r.bacc},
                        {"AUC", r.auc},
                        {"CV_baseline_task_avg", r.cv_avg},
                        {"ICC", r.icc ? Cell(r.icc->icc) : Cell(std::string("NA"))},
                        {"ICC_label", r.icc ? std::string(to_string(r.icc->label)) : std::string("NA")}});
  }
  write_table(table, path, TableFormat::csv, kEvaluationColumns);
}

int exit_code_for(ErrorKind kind) { return kind == ErrorKind::config || kind == ErrorKind::spec ? 2 : 1; }

}  // namespace sknaflow
