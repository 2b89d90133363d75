#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "accent/errors.hpp"

namespace accent {

// Mono PCM audio. Samples are nominally in [-1, 1]; sample_rate in Hz.
struct Signal {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_id;

  double duration_seconds() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void write_u32le(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u16le(std::ostream& os, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace detail

// Decodes a RIFF/WAVE file into a canonical mono Signal.
// Accepts PCM 8/16/24-bit integer and 32-bit IEEE float data, 1 or 2
// channels. Stereo is downmixed by per-sample mean; integer samples are
// scaled by the type's max magnitude (2^15 for 16-bit, etc.).
inline Signal load_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("load_wav: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw MalformedHeader("load_wav: not a RIFF/WAVE file: " + path);
  }

  std::uint16_t format_tag = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t sz = detail::read_u32le(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + sz > bytes.size()) break;  // truncated chunk, stop scanning
    if (std::memcmp(id, "fmt ", 4) == 0 && sz >= 16) {
      format_tag = detail::read_u16le(bytes.data() + body);
      channels = detail::read_u16le(bytes.data() + body + 2);
      rate = detail::read_u32le(bytes.data() + body + 4);
      bits = detail::read_u16le(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = sz;
    }
    pos = body + sz + (sz & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw MalformedHeader("load_wav: missing fmt chunk: " + path);
  if (format_tag != 1 && format_tag != 3) {
    throw UnsupportedEncoding("load_wav: unsupported format tag " +
                              std::to_string(format_tag) + " (PCM and IEEE float only)");
  }
  if (channels != 1 && channels != 2) {
    throw UnsupportedEncoding("load_wav: unsupported channel count " +
                              std::to_string(channels));
  }
  if (format_tag == 1 && bits != 8 && bits != 16 && bits != 24) {
    throw UnsupportedEncoding("load_wav: unsupported PCM bit depth " +
                              std::to_string(bits));
  }
  if (format_tag == 3 && bits != 32) {
    throw UnsupportedEncoding("load_wav: unsupported float bit depth " +
                              std::to_string(bits));
  }
  if (rate == 0) throw MalformedHeader("load_wav: zero sample rate: " + path);

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_size = bytes_per_sample * channels;
  const std::size_t frames = frame_size ? data_len / frame_size : 0;
  if (data == nullptr || frames == 0) {
    throw EmptyAudio("load_wav: no audio frames in " + path);
  }

  Signal out;
  out.sample_rate = static_cast<int>(rate);
  out.source_id = path;
  out.samples.resize(frames);

  auto decode = [&](const unsigned char* p) -> double {
    switch (bits) {
      case 8:  // unsigned, offset binary
        return (static_cast<int>(p[0]) - 128) / 128.0;
      case 16: {
        const std::int16_t v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        return v / 32768.0;
      }
      case 24: {
        std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
        if (v & 0x800000) v |= ~0xffffff;  // sign extend
        return v / 8388608.0;
      }
      default: {  // 32-bit float
        float fv;
        std::memcpy(&fv, p, 4);
        return static_cast<double>(fv);
      }
    }
  };

  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* p = data + i * frame_size;
    double v = decode(p);
    if (channels == 2) v = 0.5 * (v + decode(p + bytes_per_sample));
    out.samples[i] = v;
  }
  return out;
}

// Writes a Signal as 16-bit PCM mono WAV. Samples are clamped to [-1, 1]
// and quantized with rounding.
inline void save_wav_pcm16(const Signal& signal, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoFailure("save_wav_pcm16: cannot open " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(signal.samples.size());
  const std::uint32_t data_bytes = n * 2;
  f.write("RIFF", 4);
  detail::write_u32le(f, 36 + data_bytes);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  detail::write_u32le(f, 16);
  detail::write_u16le(f, 1);  // PCM
  detail::write_u16le(f, 1);  // mono
  detail::write_u32le(f, static_cast<std::uint32_t>(signal.sample_rate));
  detail::write_u32le(f, static_cast<std::uint32_t>(signal.sample_rate) * 2);
  detail::write_u16le(f, 2);   // block align
  detail::write_u16le(f, 16);  // bits
  f.write("data", 4);
  detail::write_u32le(f, data_bytes);
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    const double clamped = std::clamp(signal.samples[i], -1.0, 1.0);
    const long q = std::clamp(std::lround(clamped * 32768.0), -32768L, 32767L);
    detail::write_u16le(f, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  if (!f) throw IoFailure("save_wav_pcm16: write failed: " + path);
}

// Linear-interpolation resampling. Output length is round(n * ratio), so
// the output duration stays within one sample of the input duration.
inline Signal resample(const Signal& signal, int target_rate) {
  if (target_rate <= 0) throw InvalidConfig("resample: target_rate must be > 0");
  if (signal.sample_rate == target_rate) return signal;

  const double ratio = static_cast<double>(target_rate) / signal.sample_rate;
  const std::size_t in_n = signal.samples.size();
  const std::size_t out_n = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(in_n) * ratio)));

  Signal out;
  out.sample_rate = target_rate;
  out.source_id = signal.source_id;
  out.samples.resize(out_n);
  const double step = static_cast<double>(signal.sample_rate) / target_rate;
  for (std::size_t i = 0; i < out_n; ++i) {
    double pos = static_cast<double>(i) * step;
    if (pos >= static_cast<double>(in_n - 1)) {
      out.samples[i] = signal.samples[in_n - 1];
      continue;
    }
    const std::size_t i0 = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i0);
    // v0 + f*(v1-v0) keeps constant signals bit-exact
    out.samples[i] =
        signal.samples[i0] + frac * (signal.samples[i0 + 1] - signal.samples[i0]);
  }
  return out;
}

// Scales so the peak magnitude is 1. All-zero signals pass through.
inline Signal normalize_peak(const Signal& signal) {
  if (signal.samples.empty()) throw EmptyAudio("normalize_peak: empty signal");
  double peak = 0.0;
  for (double s : signal.samples) peak = std::max(peak, std::fabs(s));
  if (peak <= 0.0) return signal;
  Signal out = signal;
  for (double& s : out.samples) s /= peak;
  return out;
}

}  // namespace accent
