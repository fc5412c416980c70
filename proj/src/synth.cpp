#include "sknaflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "sknaflow/error.hpp"
#include "sknaflow/filters.hpp"
#include "sknaflow/table.hpp"

namespace sknaflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kModule = "synth";

[[noreturn]] void spec_error(const std::string& detail) {
  throw Error(ErrorKind::spec, kModule, "parse_synth_spec", detail);
}

double number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number()) spec_error(std::string(key) + " must be a number");
  return doc.at(key).get<double>();
}

void check_spec(const SynthSpec& s) {
  if (!(s.duration_s > 0.0)) spec_error("duration_s must be positive");
  if (!(s.fs > 0.0)) spec_error("fs must be positive");
  if (s.channels == 0) spec_error("channels must be >= 1");
  if (!(s.noise_rms_uv > 0.0)) spec_error("noise_rms_uv must be positive");
  if (!(s.burst_band.low_hz > 0.0 && s.burst_band.low_hz < s.burst_band.high_hz && s.burst_band.high_hz < s.fs / 2.0)) {
    spec_error("burst_band must satisfy 0 < low < high < fs/2");
  }
  if (!(s.burst_gain >= 0.0)) spec_error("burst_gain must be >= 0");
  if (!(s.burst_duration_s > 0.0)) spec_error("burst_duration_s must be positive");
  if (!(s.guard_s >= 0.0)) spec_error("guard_s must be >= 0");
  if (s.vas && s.condition != Condition::TG) spec_error("vas is only meaningful for TG");
  if (s.vas && !(*s.vas >= 0.0 && *s.vas <= 10.0)) spec_error("vas must lie in [0, 10]");

  std::vector<double> starts = s.burst_starts_s;
  std::sort(starts.begin(), starts.end());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const double end = starts[i] + s.burst_duration_s;
    if (starts[i] < 0.0 || end > s.duration_s) {
      spec_error("burst at " + std::to_string(starts[i]) + " s does not fit in the " + std::to_string(s.duration_s) +
                 " s recording");
    }
    if (i + 1 < starts.size() && starts[i + 1] < end) {
      spec_error("bursts at " + std::to_string(starts[i]) + " s and " + std::to_string(starts[i + 1]) + " s overlap");
    }
  }
}

}  // namespace

SynthSpec parse_synth_spec(const json& doc) {
  if (!doc.is_object()) spec_error("spec must be a JSON object");
  static const std::set<std::string> keys{
      "duration_s",    "fs",      "channels", "noise_rms_uv",  "burst_band",     "burst_gain",
      "burst_starts_s", "first_burst_s", "burst_period_s", "burst_count", "burst_duration_s", "guard_s",
      "condition",     "vas",     "seed",     "format"};
  for (const auto& [key, value] : doc.items()) {
    if (!keys.count(key)) spec_error("unknown key '" + key + "'");
  }

  SynthSpec s;
  s.duration_s = number(doc, "duration_s", s.duration_s);
  s.fs = number(doc, "fs", s.fs);
  const double channels = number(doc, "channels", 1.0);
  if (channels < 1.0 || channels != std::floor(channels)) spec_error("channels must be a positive integer");
  s.channels = static_cast<std::size_t>(channels);
  s.noise_rms_uv = number(doc, "noise_rms_uv", s.noise_rms_uv);
  if (doc.contains("burst_band")) {
    const auto& b = doc.at("burst_band");
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
      spec_error("burst_band must be [low_hz, high_hz]");
    }
    s.burst_band = {b[0].get<double>(), b[1].get<double>()};
  }
  s.burst_gain = number(doc, "burst_gain", s.burst_gain);
  s.burst_duration_s = number(doc, "burst_duration_s", s.burst_duration_s);
  s.guard_s = number(doc, "guard_s", s.guard_s);

  const bool listed = doc.contains("burst_starts_s");
  const bool periodic = doc.contains("burst_period_s") || doc.contains("burst_count") || doc.contains("first_burst_s");
  if (listed && periodic) spec_error("give either burst_starts_s or first_burst_s/burst_period_s/burst_count");
  if (listed) {
    const auto& a = doc.at("burst_starts_s");
    if (!a.is_array()) spec_error("burst_starts_s must be an array");
    for (const auto& v : a) {
      if (!v.is_number()) spec_error("burst_starts_s must hold numbers");
      s.burst_starts_s.push_back(v.get<double>());
    }
  } else if (periodic) {
    const double first = number(doc, "first_burst_s", 0.0);
    const double period = number(doc, "burst_period_s", 0.0);
    const double n = number(doc, "burst_count", 0.0);
    if (!(period > 0.0) || n < 0.0 || n != std::floor(n)) {
      spec_error("burst_period_s must be positive and burst_count a non-negative integer");
    }
    for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
      s.burst_starts_s.push_back(first + period * static_cast<double>(k));
    }
  }

  if (doc.contains("condition")) {
    if (!doc.at("condition").is_string()) spec_error("condition must be a string");
    try {
      s.condition = parse_condition(doc.at("condition").get<std::string>());
    } catch (const Error& e) {
      spec_error(e.detail());
    }
    if (s.condition != Condition::TG) s.vas.reset();
  }
  if (doc.contains("vas")) {
    if (doc.at("vas").is_null()) s.vas.reset();
    else s.vas = number(doc, "vas", 0.0);
  }
  const double seed = number(doc, "seed", 0.0);
  if (seed < 0.0 || seed != std::floor(seed)) spec_error("seed must be a non-negative integer");
  s.seed = static_cast<std::uint64_t>(seed);
  if (doc.contains("format")) {
    if (!doc.at("format").is_string()) spec_error("format must be a string");
    try {
      s.format = parse_recording_format(doc.at("format").get<std::string>());
    } catch (const Error& e) {
      spec_error(e.detail());
    }
  }
  check_spec(s);
  return s;
}

SynthSpec load_synth_spec(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::config, kModule, "load_synth_spec", "spec file not found: " + path.string());
  try {
    return parse_synth_spec(json::parse(read_text_file(path, kModule, "load_synth_spec")));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, kModule, "load_synth_spec", path.string() + ": " + e.what());
  }
}

SynthOutput synthesize(const SynthSpec& spec) {
  check_spec(spec);
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.fs));
  std::vector<double> starts = spec.burst_starts_s;
  std::sort(starts.begin(), starts.end());

  std::vector<char> in_burst(n, 0);
  for (double t0 : starts) {
    const auto a = static_cast<std::size_t>(std::llround(t0 * spec.fs));
    const auto b = std::min(n, static_cast<std::size_t>(std::llround((t0 + spec.burst_duration_s) * spec.fs)));
    std::fill(in_burst.begin() + static_cast<std::ptrdiff_t>(a), in_burst.begin() + static_cast<std::ptrdiff_t>(b), 1);
  }

  const auto taps = design_fir(FilterSpec::bandpass(spec.burst_band.low_hz, spec.burst_band.high_hz), spec.fs);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_rms_uv);

  SynthOutput out;
  out.recording.sample_rate_hz = spec.fs;
  for (std::size_t c = 0; c < spec.channels; ++c) {
    Channel ch;
    ch.id = "ch" + std::to_string(c + 1);
    ch.samples.resize(n);
    for (auto& v : ch.samples) v = noise(rng);
    if (spec.burst_gain != 1.0 && !starts.empty()) {
      const auto band = apply_filter(ch.samples, taps, true);
      for (std::size_t i = 0; i < n; ++i) {
        if (in_burst[i]) ch.samples[i] += (spec.burst_gain - 1.0) * band[i];
      }
    }
    out.recording.channels.push_back(std::move(ch));
  }

  // Gaps between bursts become baseline, trimmed by the guard on burst sides.
  double cursor = 0.0;
  bool after_burst = false;
  auto add_baseline = [&](double end, bool before_burst) {
    const double a = cursor + (after_burst ? spec.guard_s : 0.0);
    const double b = end - (before_burst ? spec.guard_s : 0.0);
    if (b > a) out.annotations.push_back({SegmentLabel::baseline, spec.condition, a, b, std::nullopt});
  };
  for (double t0 : starts) {
    add_baseline(t0, true);
    out.annotations.push_back({SegmentLabel::task, spec.condition, t0, t0 + spec.burst_duration_s, spec.vas});
    cursor = t0 + spec.burst_duration_s;
    after_burst = true;
  }
  add_baseline(spec.duration_s, false);
  return out;
}

std::vector<fs::path> write_synth(const SynthSpec& spec, const fs::path& out_dir) {
  const SynthOutput data = synthesize(spec);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir)) {
    throw Error(ErrorKind::io, kModule, "write_synth", "cannot create output directory " + out_dir.string());
  }

  const std::string recording_name = spec.format == RecordingFormat::wav ? "recording.wav" : "recording.csv";
  const fs::path recording = out_dir / recording_name;
  if (spec.format == RecordingFormat::wav) write_recording_wav(data.recording, recording, WavSampleType::float32);
  else write_recording_csv(data.recording, recording);
  const fs::path annotations = out_dir / "annotations.csv";
  write_annotations(data.annotations, annotations);

  json config{{"recordings", json::array({{{"path", recording_name},
                                           {"format", std::string(to_string(spec.format))},
                                           {"subject", "synth"}}})},
              {"annotations", "annotations.csv"},
              {"seed", spec.seed}};
  const fs::path config_path = out_dir / "config.json";
  std::ofstream f(config_path, std::ios::binary | std::ios::trunc);
  f << config.dump(2) << "\n";
  if (!f) throw Error(ErrorKind::io, kModule, "write_synth", "write failed for " + config_path.string());
  return {recording, annotations, config_path};
}

}  // namespace sknaflow
