#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sknaflow {

struct Channel {
  std::string id;
  std::vector<double> samples;  // microvolts
};

// Multi-channel, uniformly sampled recording. All channels share one length.
struct Recording {
  std::vector<Channel> channels;
  double sample_rate_hz = 0.0;
  std::optional<std::string> start_time;

  std::size_t length() const noexcept { return channels.empty() ? 0 : channels.front().samples.size(); }
  double duration_s() const noexcept { return static_cast<double>(length()) / sample_rate_hz; }
  const Channel& channel(std::string_view id) const;
  std::vector<std::string> channel_ids() const;
};

// Throws a data/validation error if the recording breaks its invariants.
void validate(const Recording& rec);

enum class RecordingFormat { csv, wav };

RecordingFormat parse_recording_format(std::string_view text);
std::string_view to_string(RecordingFormat format);

// `wav_scale` converts raw PCM values (integer codes or float samples) to
// microvolts; it is ignored for CSV input.
Recording load_recording(const std::filesystem::path& path, RecordingFormat format, double wav_scale = 1.0);

// Writes `time_s,<chan...>` with 17 significant digits.
void write_recording_csv(const Recording& rec, const std::filesystem::path& path);

enum class WavSampleType { pcm16, pcm24, pcm32, float32, float64 };

// Samples are divided by `scale` before encoding; integer types are
// rounded and clipped.
void write_recording_wav(const Recording& rec, const std::filesystem::path& path, WavSampleType type,
                         double scale = 1.0);

enum class SegmentLabel { baseline, task };
enum class Condition { VM, ST, TG };
enum class PainGroup { low_pain, high_pain };

std::string_view to_string(SegmentLabel label);
std::string_view to_string(Condition condition);
std::string_view to_string(PainGroup group);
SegmentLabel parse_segment_label(std::string_view text);
Condition parse_condition(std::string_view text);

// low_pain for 0 < vas < 4, high_pain for vas >= 4; vas == 0 belongs to no group.
std::optional<PainGroup> pain_group_for(double vas);

struct SegmentAnnotation {
  SegmentLabel label = SegmentLabel::baseline;
  Condition condition = Condition::VM;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<double> vas;

  double duration_s() const noexcept { return end_s - start_s; }
  std::optional<PainGroup> pain_group() const;

  friend bool operator==(const SegmentAnnotation&, const SegmentAnnotation&) = default;
};

std::vector<SegmentAnnotation> parse_annotations(const std::string& csv_text, const std::string& source = "<memory>");

// Reads `label,condition,start_s,end_s,vas`, sorts by start time and checks
// ranges and overlaps. When `recording_duration_s` is given, every segment
// must also end inside the recording.
std::vector<SegmentAnnotation> load_annotations(const std::filesystem::path& path,
                                                std::optional<double> recording_duration_s = std::nullopt);

void validate_annotations(std::span<const SegmentAnnotation> segments,
                          std::optional<double> recording_duration_s = std::nullopt);

void write_annotations(std::span<const SegmentAnnotation> segments, const std::filesystem::path& path);

}  // namespace sknaflow
