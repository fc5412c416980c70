#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sknaflow/band.hpp"
#include "sknaflow/ingest.hpp"

namespace sknaflow {

// Gaussian noise with bursts: inside each burst the `burst_band` content of
// the noise is scaled by `burst_gain`, so a gain of 1 leaves the recording
// statistically unchanged.
struct SynthSpec {
  double duration_s = 120.0;
  double fs = 10000.0;
  std::size_t channels = 1;
  double noise_rms_uv = 10.0;
  FrequencyBand burst_band{150.0, 500.0};
  double burst_gain = 5.0;
  std::vector<double> burst_starts_s;
  double burst_duration_s = 10.0;
  // Gap kept between a burst and the neighbouring baseline segments.
  double guard_s = 0.0;
  Condition condition = Condition::TG;
  std::optional<double> vas = 6.0;
  std::uint64_t seed = 0;
  RecordingFormat format = RecordingFormat::wav;
};

// Burst times come either from "burst_starts_s" or from
// "first_burst_s" + "burst_period_s" + "burst_count".
SynthSpec parse_synth_spec(const nlohmann::json& document);
SynthSpec load_synth_spec(const std::filesystem::path& path);

struct SynthOutput {
  Recording recording;
  std::vector<SegmentAnnotation> annotations;  // bursts are task, gaps baseline
};

SynthOutput synthesize(const SynthSpec& spec);

// Writes the recording, annotations.csv and a config.json that `run`
// accepts as is. Returns the written paths.
std::vector<std::filesystem::path> write_synth(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace sknaflow
