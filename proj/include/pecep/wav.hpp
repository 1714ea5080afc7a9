#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace pecep {

// Mono 16-bit PCM RIFF/WAVE, little-endian. Samples are clamped to [-1, 1]
// before quantization.
void write_wav16(const std::filesystem::path& path, std::span<const double> samples,
                 int sample_rate);

struct WavData {
  std::vector<double> samples;  // scaled back to [-1, 1]
  int sample_rate = 0;
};
WavData read_wav16(const std::filesystem::path& path);

}  // namespace pecep
