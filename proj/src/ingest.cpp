#include "sknaflow/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sknaflow/error.hpp"
#include "sknaflow/log.hpp"
#include "sknaflow/table.hpp"
#include "wav.hpp"

namespace sknaflow {

namespace {

constexpr const char* kModule = "ingest";
constexpr double kSpacingTolerance = 1e-6;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

std::string line_ref(const std::string& source, std::size_t line) {
  return source + " line " + std::to_string(line);
}

Recording parse_recording_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  // Header.
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.size() < 2 || header.front() != "time_s") {
    throw Error(ErrorKind::parse, kModule, "load_recording",
                line_ref(source, line_no) + ": header must be 'time_s,<chan1>,...'");
  }
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i].empty()) {
      throw Error(ErrorKind::parse, kModule, "load_recording",
                  line_ref(source, line_no) + ": empty channel name in column " + std::to_string(i + 1));
    }
  }

  const std::size_t nch = header.size() - 1;
  Recording rec;
  rec.channels.resize(nch);
  for (std::size_t c = 0; c < nch; ++c) rec.channels[c].id = header[c + 1];
  std::vector<double> times;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string_view rest(line);
    std::size_t field = 0;
    double t = 0.0;
    while (true) {
      const auto comma = rest.find(',');
      const auto token = rest.substr(0, comma);
      double v = 0.0;
      if (field > nch || !parse_double(token, v)) {
        throw Error(ErrorKind::parse, kModule, "load_recording",
                    line_ref(source, line_no) + ": malformed field " + std::to_string(field + 1));
      }
      if (field == 0) {
        t = v;
      } else {
        if (!std::isfinite(v)) {
          throw Error(ErrorKind::data, kModule, "load_recording",
                      source + ": non-finite sample at index " + std::to_string(times.size()) + " in channel '" +
                          rec.channels[field - 1].id + "' (" + line_ref(source, line_no) + ")");
        }
        rec.channels[field - 1].samples.push_back(v);
      }
      ++field;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (field != nch + 1) {
      throw Error(ErrorKind::parse, kModule, "load_recording",
                  line_ref(source, line_no) + ": expected " + std::to_string(nch + 1) + " fields, got " +
                      std::to_string(field));
    }
    if (!std::isfinite(t)) {
      throw Error(ErrorKind::format, kModule, "load_recording", line_ref(source, line_no) + ": non-finite time");
    }
    times.push_back(t);
  }

  if (times.size() < 2) {
    throw Error(ErrorKind::format, kModule, "load_recording",
                source + ": at least two rows are needed to infer the sample rate");
  }
  const double span = times.back() - times.front();
  const double dt = span / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::format, kModule, "load_recording", source + ": time column is not increasing");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double step = times[i] - times[i - 1];
    if (!(step > 0.0)) {
      throw Error(ErrorKind::format, kModule, "load_recording",
                  source + ": time column not strictly increasing at row " + std::to_string(i + 1));
    }
    if (std::abs(step - dt) > kSpacingTolerance * dt) {
      throw Error(ErrorKind::format, kModule, "load_recording",
                  source + ": non-uniform time spacing at row " + std::to_string(i + 1));
    }
  }

  double fs = 1.0 / dt;
  const double snapped = std::round(fs);
  if (snapped > 0.0 && std::abs(fs - snapped) <= kSpacingTolerance * fs) fs = snapped;
  rec.sample_rate_hz = fs;
  return rec;
}

}  // namespace

const Channel& Recording::channel(std::string_view id) const {
  for (const auto& c : channels) {
    if (c.id == id) return c;
  }
  throw Error(ErrorKind::validation, kModule, "channel", "no channel named '" + std::string(id) + "'");
}

std::vector<std::string> Recording::channel_ids() const {
  std::vector<std::string> ids;
  for (const auto& c : channels) ids.push_back(c.id);
  return ids;
}

void validate(const Recording& rec) {
  if (!(rec.sample_rate_hz > 0.0) || !std::isfinite(rec.sample_rate_hz)) {
    throw Error(ErrorKind::validation, kModule, "validate", "sample rate must be positive");
  }
  if (rec.channels.empty()) throw Error(ErrorKind::validation, kModule, "validate", "recording has no channels");
  const std::size_t n = rec.channels.front().samples.size();
  if (n == 0) throw Error(ErrorKind::validation, kModule, "validate", "recording has no samples");
  for (const auto& c : rec.channels) {
    if (c.samples.size() != n) {
      throw Error(ErrorKind::validation, kModule, "validate", "channel '" + c.id + "' length differs");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(c.samples[i])) {
        throw Error(ErrorKind::data, kModule, "validate",
                    "non-finite sample at index " + std::to_string(i) + " in channel '" + c.id + "'");
      }
    }
  }
}

RecordingFormat parse_recording_format(std::string_view text) {
  if (text == "csv") return RecordingFormat::csv;
  if (text == "wav") return RecordingFormat::wav;
  throw Error(ErrorKind::config, kModule, "load_recording", "unknown recording format '" + std::string(text) + "'");
}

std::string_view to_string(RecordingFormat format) { return format == RecordingFormat::csv ? "csv" : "wav"; }

Recording load_recording(const std::filesystem::path& path, RecordingFormat format, double wav_scale) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::io, kModule, "load_recording", "file not found: " + path.string());
  }
  Recording rec = format == RecordingFormat::csv
                      ? parse_recording_csv(read_text_file(path, kModule, "load_recording"), path.string())
                      : detail::read_wav(path, wav_scale);
  validate(rec);
  log::debug("loaded " + path.string() + ": " + std::to_string(rec.channels.size()) + " channel(s), " +
             std::to_string(rec.length()) + " samples at " + std::to_string(rec.sample_rate_hz) + " Hz");
  return rec;
}

void write_recording_csv(const Recording& rec, const std::filesystem::path& path) {
  validate(rec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, kModule, "write_recording_csv", "cannot open " + path.string());
  out << "time_s";
  for (const auto& c : rec.channels) out << ',' << c.id;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < rec.length(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(i) / rec.sample_rate_hz);
    out << buf;
    for (const auto& c : rec.channels) {
      std::snprintf(buf, sizeof(buf), ",%.17g", c.samples[i]);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::io, kModule, "write_recording_csv", "write failed for " + path.string());
}

std::string_view to_string(SegmentLabel label) { return label == SegmentLabel::baseline ? "baseline" : "task"; }

std::string_view to_string(Condition condition) {
  switch (condition) {
    case Condition::VM: return "VM";
    case Condition::ST: return "ST";
    case Condition::TG: return "TG";
  }
  return "?";
}

std::string_view to_string(PainGroup group) { return group == PainGroup::low_pain ? "low_pain" : "high_pain"; }

SegmentLabel parse_segment_label(std::string_view text) {
  if (text == "baseline") return SegmentLabel::baseline;
  if (text == "task") return SegmentLabel::task;
  throw Error(ErrorKind::parse, kModule, "load_annotations", "unknown label '" + std::string(text) + "'");
}

Condition parse_condition(std::string_view text) {
  if (text == "VM") return Condition::VM;
  if (text == "ST") return Condition::ST;
  if (text == "TG") return Condition::TG;
  throw Error(ErrorKind::parse, kModule, "load_annotations", "unknown condition '" + std::string(text) + "'");
}

std::optional<PainGroup> pain_group_for(double vas) {
  if (vas >= 4.0) return PainGroup::high_pain;
  if (vas > 0.0) return PainGroup::low_pain;
  return std::nullopt;
}

std::optional<PainGroup> SegmentAnnotation::pain_group() const {
  if (condition != Condition::TG || !vas) return std::nullopt;
  return pain_group_for(*vas);
}

void validate_annotations(std::span<const SegmentAnnotation> segments, std::optional<double> recording_duration_s) {
  const std::string op = "load_annotations";
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const std::string where = "segment " + std::to_string(i) + " [" + std::to_string(s.start_s) + ", " +
                              std::to_string(s.end_s) + "]";
    if (!std::isfinite(s.start_s) || !std::isfinite(s.end_s) || s.start_s < 0.0 || !(s.end_s > s.start_s)) {
      throw Error(ErrorKind::range, kModule, op, where + ": need 0 <= start_s < end_s");
    }
    if (s.vas) {
      if (!(*s.vas >= 0.0 && *s.vas <= 10.0)) {
        throw Error(ErrorKind::range, kModule, op, where + ": vas " + std::to_string(*s.vas) + " outside [0, 10]");
      }
      if (s.condition != Condition::TG) {
        throw Error(ErrorKind::validation, kModule, op, where + ": vas is only allowed for TG segments");
      }
    }
    if (recording_duration_s && s.end_s > *recording_duration_s * (1.0 + 1e-12)) {
      throw Error(ErrorKind::range, kModule, op,
                  where + ": ends after the recording (" + std::to_string(*recording_duration_s) + " s)");
    }
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      const auto& a = segments[i];
      const auto& b = segments[j];
      if (a.start_s < b.end_s && b.start_s < a.end_s) {
        throw Error(ErrorKind::validation, kModule, op,
                    "overlapping segments [" + std::to_string(a.start_s) + ", " + std::to_string(a.end_s) +
                        "] and [" + std::to_string(b.start_s) + ", " + std::to_string(b.end_s) + "]");
      }
    }
  }
}

std::vector<SegmentAnnotation> parse_annotations(const std::string& csv_text, const std::string& source) {
  const TextTable table = parse_csv(csv_text, source);
  const std::vector<std::string> expected{"label", "condition", "start_s", "end_s", "vas"};
  std::vector<std::string> header = table.columns;
  for (auto& h : header) h = trim(h);
  if (header != expected) {
    throw Error(ErrorKind::parse, kModule, "load_annotations",
                source + " line 1: header must be 'label,condition,start_s,end_s,vas'");
  }

  std::vector<SegmentAnnotation> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = source + " row " + std::to_string(r + 2);
    SegmentAnnotation seg;
    try {
      seg.label = parse_segment_label(trim(row[0]));
      seg.condition = parse_condition(trim(row[1]));
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, kModule, "load_annotations", where + ": " + e.detail());
    }
    if (!parse_double(row[2], seg.start_s) || !parse_double(row[3], seg.end_s)) {
      throw Error(ErrorKind::parse, kModule, "load_annotations", where + ": malformed start_s/end_s");
    }
    if (!trim(row[4]).empty()) {
      double v = 0.0;
      if (!parse_double(row[4], v)) throw Error(ErrorKind::parse, kModule, "load_annotations", where + ": malformed vas");
      seg.vas = v;
    }
    out.push_back(seg);
  }
  std::sort(out.begin(), out.end(), [](const SegmentAnnotation& a, const SegmentAnnotation& b) {
    if (a.start_s != b.start_s) return a.start_s < b.start_s;
    return a.end_s < b.end_s;
  });
  return out;
}

std::vector<SegmentAnnotation> load_annotations(const std::filesystem::path& path,
                                                std::optional<double> recording_duration_s) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::io, kModule, "load_annotations", "file not found: " + path.string());
  }
  auto segments = parse_annotations(read_text_file(path, kModule, "load_annotations"), path.string());
  validate_annotations(segments, recording_duration_s);
  for (const auto& s : segments) {
    if (s.condition == Condition::TG && s.label == SegmentLabel::task && s.vas && !pain_group_for(*s.vas)) {
      log::info("TG segment at " + std::to_string(s.start_s) + " s has vas 0 and belongs to no pain group; skipped");
    }
  }
  return segments;
}

void write_annotations(std::span<const SegmentAnnotation> segments, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, kModule, "write_annotations", "cannot open " + path.string());
  out << "label,condition,start_s,end_s,vas\n";
  char buf[64];
  for (const auto& s : segments) {
    out << to_string(s.label) << ',' << to_string(s.condition);
    std::snprintf(buf, sizeof(buf), ",%.9g,%.9g,", s.start_s, s.end_s);
    out << buf;
    if (s.vas) {
      std::snprintf(buf, sizeof(buf), "%.9g", *s.vas);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace sknaflow
