#include "wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sknaflow/error.hpp"

namespace sknaflow {

namespace {

constexpr const char* kModule = "ingest";

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}
std::uint16_t read_u16(const unsigned char* p) { return std::uint16_t(p[0] | (p[1] << 8)); }

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}
void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}
void put_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

double decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      std::uint32_t u = read_u32(p);
      return static_cast<double>(std::bit_cast<float>(u));
    }
    std::uint64_t u = std::uint64_t(read_u32(p)) | (std::uint64_t(read_u32(p + 4)) << 32);
    return std::bit_cast<double>(u);
  }
  switch (bits) {
    case 16: return static_cast<double>(static_cast<std::int16_t>(read_u16(p)));
    case 24: {
      std::int32_t v = std::int32_t(p[0]) | (std::int32_t(p[1]) << 8) | (std::int32_t(p[2]) << 16);
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<double>(v);
    }
    default: return static_cast<double>(static_cast<std::int32_t>(read_u32(p)));
  }
}

}  // namespace

namespace detail {

Recording read_wav(const std::filesystem::path& path, double scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, kModule, "load_recording", "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  auto fail = [&](const std::string& why) {
    return Error(ErrorKind::format, kModule, "load_recording", path.string() + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw fail("truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw fail("short fmt chunk");
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == kFormatExtensible) {
        if (size < 40) throw fail("short extensible fmt chunk");
        format = read_u16(chunk + 32);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos = body + size + (size & 1);
  }

  if (format == 0) throw fail("missing fmt chunk");
  if (!data) throw fail("missing data chunk");
  const bool int_ok = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && (bits == 32 || bits == 64);
  if (!int_ok && !float_ok) {
    throw fail("unsupported sample encoding (format " + std::to_string(format) + ", " + std::to_string(bits) + " bits)");
  }
  if (channels == 0 || rate == 0) throw fail("zero channels or sample rate");

  const std::size_t width = bits / 8;
  const std::size_t frame = width * channels;
  const std::size_t frames = data_size / frame;
  if (frames == 0) throw fail("no sample frames");

  Recording rec;
  rec.sample_rate_hz = static_cast<double>(rate);
  rec.channels.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    rec.channels[c].id = "ch" + std::to_string(c + 1);
    rec.channels[c].samples.resize(frames);
  }
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = decode_sample(data + f * frame + c * width, format, bits) * scale;
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::data, kModule, "load_recording",
                    path.string() + ": non-finite sample at frame " + std::to_string(f) + ", channel " +
                        std::to_string(c + 1));
      }
      rec.channels[c].samples[f] = v;
    }
  }
  return rec;
}

}  // namespace detail

void write_recording_wav(const Recording& rec, const std::filesystem::path& path, WavSampleType type, double scale) {
  validate(rec);
  const double rate = std::round(rec.sample_rate_hz);
  if (std::abs(rate - rec.sample_rate_hz) > 1e-9 * rec.sample_rate_hz) {
    throw Error(ErrorKind::format, kModule, "write_recording_wav", "WAV needs an integer sample rate");
  }

  std::uint16_t format = kFormatPcm;
  std::uint16_t bits = 16;
  switch (type) {
    case WavSampleType::pcm16: bits = 16; break;
    case WavSampleType::pcm24: bits = 24; break;
    case WavSampleType::pcm32: bits = 32; break;
    case WavSampleType::float32: format = kFormatFloat; bits = 32; break;
    case WavSampleType::float64: format = kFormatFloat; bits = 64; break;
  }
  const auto nch = static_cast<std::uint16_t>(rec.channels.size());
  const std::size_t frames = rec.length();
  const std::uint32_t block = nch * (bits / 8);
  const std::uint32_t data_size = static_cast<std::uint32_t>(frames * block);

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, nch);
  put_u32(out, static_cast<std::uint32_t>(rate));
  put_u32(out, static_cast<std::uint32_t>(rate) * block);
  put_u16(out, static_cast<std::uint16_t>(block));
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);

  const double max_int = std::ldexp(1.0, bits - 1) - 1.0;
  for (std::size_t f = 0; f < frames; ++f) {
    for (const auto& ch : rec.channels) {
      const double v = ch.samples[f] / scale;
      if (format == kFormatFloat) {
        if (bits == 32) {
          put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        } else {
          const auto u = std::bit_cast<std::uint64_t>(v);
          put_u32(out, static_cast<std::uint32_t>(u & 0xFFFFFFFFu));
          put_u32(out, static_cast<std::uint32_t>(u >> 32));
        }
      } else {
        const auto code = static_cast<std::int64_t>(std::clamp(std::round(v), -max_int - 1.0, max_int));
        const auto u = static_cast<std::uint32_t>(code);
        for (int b = 0; b < bits / 8; ++b) out.push_back(static_cast<unsigned char>((u >> (8 * b)) & 0xFF));
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::io, kModule, "write_recording_wav", "cannot open " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorKind::io, kModule, "write_recording_wav", "write failed for " + path.string());
}

}  // namespace sknaflow
