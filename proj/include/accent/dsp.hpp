#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "accent/audio_io.hpp"
#include "accent/errors.hpp"

namespace accent {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

enum class Window { kHann, kRectangular };

struct StftConfig {
  std::size_t frame_len = 512;  // power of two
  std::size_t hop = 160;        // 10 ms at 16 kHz
  Window window = Window::kHann;
  double floor_db = -80.0;

  void validate() const {
    if (frame_len < 2 || (frame_len & (frame_len - 1)) != 0)
      throw InvalidConfig("StftConfig: frame_len must be a power of two >= 2");
    if (hop == 0 || hop > frame_len)
      throw InvalidConfig("StftConfig: hop must satisfy 0 < hop <= frame_len");
    if (floor_db >= 0.0)
      throw InvalidConfig("StftConfig: floor_db must be negative");
  }

  std::string cache_key() const {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "frame=%zu hop=%zu win=%d floor=%.6f",
                  frame_len, hop, static_cast<int>(window), floor_db);
    return buf;
  }
};

// Log-magnitude time-frequency grid in dB. Row r is frequency r * freq_step,
// column t is the frame starting at time t * time_step. Row-major storage.
struct Spectrogram {
  std::size_t rows = 0;  // frequency bins
  std::size_t cols = 0;  // time frames
  std::vector<double> values;
  double time_step = 0.0;  // seconds per column
  double freq_step = 0.0;  // Hz per row
  std::string source_id;

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  double min_value() const {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
  }
  double max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  }
  double duration_seconds() const { return static_cast<double>(cols) * time_step; }
  double nyquist_hz() const {
    return rows > 0 ? freq_step * static_cast<double>(rows - 1) : 0.0;
  }
};

// Complex STFT output before log compression.
struct ComplexGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::complex<double>> values;
  double time_step = 0.0;
  double freq_step = 0.0;
  std::string source_id;

  std::complex<double>& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  const std::complex<double>& at(std::size_t r, std::size_t c) const {
    return values[r * cols + c];
  }
};

// w[k] = 0.5 - 0.5 cos(2 pi k / (n-1)); endpoints are exactly zero.
inline std::vector<double> hann_window(std::size_t n) {
  if (n < 2) throw InvalidConfig("hann_window: n must be >= 2");
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) /
                                static_cast<double>(n - 1));
  w[0] = 0.0;
  w[n - 1] = 0.0;
  return w;
}

// In-place iterative radix-2 Cooley-Tukey DFT. Size must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw InvalidConfig("fft_radix2: size must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Windowed, hopped DFT. Frame t covers samples [t*hop, t*hop + frame_len);
// bins 0..frame_len/2 are kept (real-input symmetry).
inline ComplexGrid stft(const Signal& signal, const StftConfig& config) {
  config.validate();
  const std::size_t n = config.frame_len;
  if (signal.samples.size() < n)
    throw SignalTooShort("stft: signal shorter than one frame (" +
                         std::to_string(signal.samples.size()) + " < " +
                         std::to_string(n) + ")");

  const std::size_t frames = (signal.samples.size() - n) / config.hop + 1;
  const std::size_t bins = n / 2 + 1;

  std::vector<double> w;
  if (config.window == Window::kHann) w = hann_window(n);

  ComplexGrid grid;
  grid.rows = bins;
  grid.cols = frames;
  grid.values.resize(bins * frames);
  grid.time_step = static_cast<double>(config.hop) / signal.sample_rate;
  grid.freq_step = static_cast<double>(signal.sample_rate) / static_cast<double>(n);
  grid.source_id = signal.source_id;

  std::vector<std::complex<double>> buf(n);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* x = signal.samples.data() + t * config.hop;
    for (std::size_t k = 0; k < n; ++k)
      buf[k] = std::complex<double>(w.empty() ? x[k] : x[k] * w[k], 0.0);
    fft_radix2(buf);
    for (std::size_t b = 0; b < bins; ++b) grid.at(b, t) = buf[b];
  }
  return grid;
}

// 20 log10(|z| + eps), clamped to floor_db elementwise.
inline Spectrogram log_magnitude(const ComplexGrid& grid, double floor_db) {
  constexpr double kEps = 1e-10;
  Spectrogram spec;
  spec.rows = grid.rows;
  spec.cols = grid.cols;
  spec.time_step = grid.time_step;
  spec.freq_step = grid.freq_step;
  spec.source_id = grid.source_id;
  spec.values.resize(grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const double db = 20.0 * std::log10(std::abs(grid.values[i]) + kEps);
    spec.values[i] = std::max(db, floor_db);
  }
  return spec;
}

// Bilinear resize on the dB grid with corner alignment. Output values are
// convex combinations of inputs, so they stay inside [min, max].
inline Spectrogram resize_spectrogram(const Spectrogram& spec,
                                      std::size_t out_rows, std::size_t out_cols) {
  if (out_rows == 0 || out_cols == 0)
    throw InvalidConfig("resize_spectrogram: output dims must be >= 1");
  if (spec.rows == 0 || spec.cols == 0)
    throw EmptySegment("resize_spectrogram: empty input");
  if (out_rows == spec.rows && out_cols == spec.cols) return spec;

  Spectrogram out;
  out.rows = out_rows;
  out.cols = out_cols;
  out.values.resize(out_rows * out_cols);
  out.source_id = spec.source_id;
  // Steps rescale so the physical extent is preserved.
  out.time_step = spec.time_step * static_cast<double>(spec.cols) /
                  static_cast<double>(out_cols);
  out.freq_step = out_rows > 1 ? spec.freq_step * static_cast<double>(spec.rows - 1) /
                                     static_cast<double>(out_rows - 1)
                               : spec.freq_step;

  const double r_scale =
      out_rows > 1 ? static_cast<double>(spec.rows - 1) / static_cast<double>(out_rows - 1)
                   : 0.0;
  const double c_scale =
      out_cols > 1 ? static_cast<double>(spec.cols - 1) / static_cast<double>(out_cols - 1)
                   : 0.0;

  for (std::size_t r = 0; r < out_rows; ++r) {
    const double rp = static_cast<double>(r) * r_scale;
    const std::size_t r0 = std::min(static_cast<std::size_t>(rp), spec.rows - 1);
    const std::size_t r1 = std::min(r0 + 1, spec.rows - 1);
    const double rf = rp - static_cast<double>(r0);
    for (std::size_t c = 0; c < out_cols; ++c) {
      const double cp = static_cast<double>(c) * c_scale;
      const std::size_t c0 = std::min(static_cast<std::size_t>(cp), spec.cols - 1);
      const std::size_t c1 = std::min(c0 + 1, spec.cols - 1);
      const double cf = cp - static_cast<double>(c0);
      const double top = spec.at(r0, c0) * (1.0 - cf) + spec.at(r0, c1) * cf;
      const double bot = spec.at(r1, c0) * (1.0 - cf) + spec.at(r1, c1) * cf;
      out.at(r, c) = top * (1.0 - rf) + bot * rf;
    }
  }
  return out;
}

// Block-mean downsampling. Requires dims divisible by the output dims;
// falls back to bilinear resize otherwise. Used for coarse feature vectors
// where averaging (rather than point sampling) is wanted.
inline Spectrogram downsample_mean(const Spectrogram& spec,
                                   std::size_t out_rows, std::size_t out_cols) {
  if (out_rows == 0 || out_cols == 0)
    throw InvalidConfig("downsample_mean: output dims must be >= 1");
  if (spec.rows == out_rows && spec.cols == out_cols) return spec;
  if (spec.rows % out_rows != 0 || spec.cols % out_cols != 0)
    return resize_spectrogram(spec, out_rows, out_cols);

  const std::size_t br = spec.rows / out_rows;
  const std::size_t bc = spec.cols / out_cols;
  Spectrogram out;
  out.rows = out_rows;
  out.cols = out_cols;
  out.values.resize(out_rows * out_cols);
  out.time_step = spec.time_step * static_cast<double>(bc);
  out.freq_step = spec.freq_step * static_cast<double>(br);
  out.source_id = spec.source_id;
  const double inv = 1.0 / static_cast<double>(br * bc);
  for (std::size_t r = 0; r < out_rows; ++r) {
    for (std::size_t c = 0; c < out_cols; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < br; ++i)
        for (std::size_t j = 0; j < bc; ++j)
          acc += spec.at(r * br + i, c * bc + j);
      out.at(r, c) = acc * inv;
    }
  }
  return out;
}

// Binary PGM (P5), 8-bit. File rows run top-to-bottom from highest to
// lowest frequency. The grid range [min, max] maps linearly to [0, 255];
// a degenerate range maps everything to 0.
inline void export_spectrogram_pgm(const Spectrogram& spec, const std::string& path) {
  if (spec.rows == 0 || spec.cols == 0)
    throw EmptySegment("export_spectrogram_pgm: empty spectrogram");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoFailure("export_spectrogram_pgm: cannot open " + path);

  const double lo = spec.min_value();
  const double hi = spec.max_value();
  const double range = hi - lo;

  f << "P5\n" << spec.cols << " " << spec.rows << "\n255\n";
  std::vector<unsigned char> row(spec.cols);
  for (std::size_t r = spec.rows; r-- > 0;) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      double v = 0.0;
      if (range > 0.0) v = (spec.at(r, c) - lo) / range * 255.0;
      row[c] = static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
    }
    f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!f) throw IoFailure("export_spectrogram_pgm: write failed: " + path);
}

// CSV grid: header line "# freq_step=<Hz> time_step=<s>", then one row per
// frequency bin, comma-separated with 6 decimal places.
inline void export_spectrogram_csv(const Spectrogram& spec, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoFailure("export_spectrogram_csv: cannot open " + path);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# freq_step=%.9g time_step=%.9g\n",
                spec.freq_step, spec.time_step);
  f << buf;
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.6f", spec.at(r, c));
      if (c) f << ',';
      f << buf;
    }
    f << '\n';
  }
  if (!f) throw IoFailure("export_spectrogram_csv: write failed: " + path);
}

// Parses a P5 PGM written by export_spectrogram_pgm. Returns (rows, cols,
// pixels top-to-bottom). Used by round-trip checks and the CLI.
struct PgmImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<unsigned char> pixels;
};

inline PgmImage load_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("load_pgm: cannot open " + path);
  std::string magic;
  f >> magic;
  if (magic != "P5") throw MalformedHeader("load_pgm: not a P5 file: " + path);
  std::size_t w = 0, h = 0;
  int maxval = 0;
  f >> w >> h >> maxval;
  if (!f || w == 0 || h == 0 || maxval != 255)
    throw MalformedHeader("load_pgm: bad header: " + path);
  f.get();  // single whitespace after maxval
  PgmImage img;
  img.rows = h;
  img.cols = w;
  img.pixels.resize(w * h);
  f.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(w * h));
  if (static_cast<std::size_t>(f.gcount()) != w * h)
    throw MalformedHeader("load_pgm: truncated pixel data: " + path);
  return img;
}

// Re-parses the CSV grid format. Round-trips values within 1e-6.
inline Spectrogram import_spectrogram_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoFailure("import_spectrogram_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("# freq_step=", 0) != 0)
    throw MalformedHeader("import_spectrogram_csv: missing header: " + path);
  Spectrogram spec;
  std::sscanf(line.c_str(), "# freq_step=%lf time_step=%lf", &spec.freq_step,
              &spec.time_step);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::size_t start = 0, count = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      spec.values.push_back(std::stod(line.substr(start, comma - start)));
      ++count;
      start = comma + 1;
    }
    if (spec.cols == 0) spec.cols = count;
    else if (count != spec.cols)
      throw MalformedRow("import_spectrogram_csv: ragged row in " + path);
    ++spec.rows;
  }
  if (spec.rows == 0) throw EmptySegment("import_spectrogram_csv: no data: " + path);
  return spec;
}

}  // namespace accent
