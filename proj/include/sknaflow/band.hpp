#pragma once

namespace sknaflow {

// Closed frequency interval in Hz.
struct FrequencyBand {
  double low_hz = 0.0;
  double high_hz = 0.0;

  double width() const noexcept { return high_hz - low_hz; }
  bool contains(const FrequencyBand& inner) const noexcept {
    return inner.low_hz >= low_hz && inner.high_hz <= high_hz;
  }

  friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;
};

}  // namespace sknaflow
