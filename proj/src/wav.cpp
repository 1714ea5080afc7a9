#include "pecep/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "pecep/errors.hpp"

namespace pecep {

namespace {

template <typename T>
void write_le(std::ostream& out, T value) {
  for (unsigned i = 0; i < sizeof(T); ++i) {
    out.put(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
  }
}

template <typename T>
T read_le(std::istream& in) {
  std::uint64_t v = 0;
  for (unsigned i = 0; i < sizeof(T); ++i) {
    int c = in.get();
    if (c == EOF) throw IoError("read_wav16: truncated file");
    v |= static_cast<std::uint64_t>(c & 0xff) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace

void write_wav16(const std::filesystem::path& path, std::span<const double> samples,
                 int sample_rate) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("write_wav16: cannot open " + path.string());
  }
  const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size() * 2);
  const std::uint16_t channels = 1, bits = 16;
  const std::uint32_t byte_rate = static_cast<std::uint32_t>(sample_rate) * channels * bits / 8;

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, 1);  // PCM
  write_le<std::uint16_t>(out, channels);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate));
  write_le<std::uint32_t>(out, byte_rate);
  write_le<std::uint16_t>(out, channels * bits / 8);
  write_le<std::uint16_t>(out, bits);
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);
  for (double s : samples) {
    const double clamped = std::clamp(s, -1.0, 1.0);
    write_le<std::int16_t>(out, static_cast<std::int16_t>(std::lround(clamped * 32767.0)));
  }
  if (!out) {
    throw IoError("write_wav16: write failed for " + path.string());
  }
}

WavData read_wav16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("read_wav16: cannot open " + path.string());
  }
  char tag[5] = {0};
  in.read(tag, 4);
  if (std::string(tag, 4) != "RIFF") throw IoError("read_wav16: not a RIFF file");
  read_le<std::uint32_t>(in);
  in.read(tag, 4);
  if (std::string(tag, 4) != "WAVE") throw IoError("read_wav16: not a WAVE file");

  WavData wav;
  std::uint16_t channels = 0, bits = 0;
  while (in.read(tag, 4)) {
    const std::uint32_t chunk_size = read_le<std::uint32_t>(in);
    const std::string id(tag, 4);
    if (id == "fmt ") {
      const std::uint16_t fmt = read_le<std::uint16_t>(in);
      channels = read_le<std::uint16_t>(in);
      wav.sample_rate = static_cast<int>(read_le<std::uint32_t>(in));
      read_le<std::uint32_t>(in);
      read_le<std::uint16_t>(in);
      bits = read_le<std::uint16_t>(in);
      if (fmt != 1 || channels != 1 || bits != 16) {
        throw IoError("read_wav16: only mono 16-bit PCM is supported");
      }
      in.ignore(chunk_size - 16);
    } else if (id == "data") {
      const std::size_t n = chunk_size / 2;
      wav.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        wav.samples[i] = static_cast<double>(read_le<std::int16_t>(in)) / 32767.0;
      }
      return wav;
    } else {
      in.ignore(chunk_size);
    }
  }
  throw IoError("read_wav16: missing data chunk");
}

}  // namespace pecep
