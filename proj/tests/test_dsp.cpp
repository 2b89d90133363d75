#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <vector>

#include "accent/dsp.hpp"
#include "accent/rng.hpp"
#include "oracles.hpp"

using namespace accent;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "accent_dsp_tests";
  fs::create_directories(dir);
  return dir / name;
}

Signal sine(double freq, int rate, std::size_t n) {
  Signal sig;
  sig.sample_rate = rate;
  for (std::size_t i = 0; i < n; ++i)
    sig.samples.push_back(std::sin(2.0 * kPi * freq * static_cast<double>(i) / rate));
  return sig;
}

Spectrogram make_grid(std::size_t rows, std::size_t cols, double value) {
  Spectrogram spec;
  spec.rows = rows;
  spec.cols = cols;
  spec.values.assign(rows * cols, value);
  spec.time_step = 0.01;
  spec.freq_step = 31.25;
  return spec;
}

}  // namespace

TEST_CASE("hann_window values and endpoints") {
  const auto w4 = hann_window(4);
  REQUIRE(w4.size() == 4);
  CHECK(w4[0] == 0.0);
  CHECK(w4[1] == doctest::Approx(0.75));
  CHECK(w4[2] == doctest::Approx(0.75));
  CHECK(w4[3] == 0.0);

  for (std::size_t n : {2, 5, 16, 33, 512}) {
    const auto w = hann_window(n);
    CHECK(w.front() == 0.0);
    CHECK(w.back() == 0.0);
    if (n % 2 == 1) CHECK(w[n / 2] == doctest::Approx(1.0));
  }
}

TEST_CASE("fft matches the naive DFT") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(64);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    std::vector<std::complex<double>> buf(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
    fft_radix2(buf);
    const auto ref = oracles::naive_dft(x);
    for (std::size_t k = 0; k < x.size(); ++k)
      CHECK(std::abs(buf[k] - ref[k]) < 1e-9);
  }
}

TEST_CASE("stft of a 440 Hz tone peaks at bin 14 in every frame") {
  const Signal sig = sine(440.0, 16000, 16000);
  StftConfig cfg;
  cfg.frame_len = 512;
  cfg.hop = 160;
  cfg.window = Window::kRectangular;
  const ComplexGrid grid = stft(sig, cfg);
  CHECK(grid.rows == 257);
  CHECK(grid.freq_step == doctest::Approx(31.25));
  for (std::size_t t = 0; t < grid.cols; ++t) {
    std::size_t peak = 0;
    double best = 0.0;
    for (std::size_t b = 0; b < grid.rows; ++b) {
      const double mag = std::abs(grid.at(b, t));
      if (mag > best) {
        best = mag;
        peak = b;
      }
    }
    CHECK(peak == 14);  // 440 / 31.25 = 14.08
  }
}

TEST_CASE("stft of silence is all zero and short input throws") {
  Signal sig;
  sig.sample_rate = 16000;
  sig.samples.assign(2048, 0.0);
  StftConfig cfg;
  const ComplexGrid grid = stft(sig, cfg);
  for (const auto& z : grid.values) CHECK(std::abs(z) == 0.0);

  sig.samples.resize(100);
  CHECK_THROWS_AS(stft(sig, cfg), SignalTooShort);
}

TEST_CASE("stft is linear") {
  Rng rng(9);
  StftConfig cfg;
  cfg.frame_len = 256;
  cfg.hop = 128;
  for (int trial = 0; trial < 3; ++trial) {
    Signal a, b, sum;
    a.sample_rate = b.sample_rate = sum.sample_rate = 16000;
    for (int i = 0; i < 1000; ++i) {
      a.samples.push_back(rng.uniform(-1.0, 1.0));
      b.samples.push_back(rng.uniform(-1.0, 1.0));
      sum.samples.push_back(a.samples.back() + b.samples.back());
    }
    const ComplexGrid ga = stft(a, cfg), gb = stft(b, cfg), gs = stft(sum, cfg);
    for (std::size_t i = 0; i < gs.values.size(); ++i)
      CHECK(std::abs(gs.values[i] - (ga.values[i] + gb.values[i])) < 1e-9);
  }
}

TEST_CASE("rectangular-window Parseval identity") {
  Rng rng(13);
  const std::size_t n = 512;
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);

  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
  fft_radix2(buf);

  double time_energy = 0.0;
  for (double v : x) time_energy += v * v;
  double freq_energy = 0.0;
  for (const auto& z : buf) freq_energy += std::norm(z);
  freq_energy /= static_cast<double>(n);

  CHECK(std::fabs(time_energy - freq_energy) / time_energy < 1e-9);
}

TEST_CASE("pure-tone peak-bin property over random frequencies") {
  Rng rng(21);
  StftConfig cfg;
  cfg.frame_len = 512;
  cfg.hop = 512;
  cfg.window = Window::kRectangular;
  const double freq_step = 16000.0 / 512.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t bin = 2 + rng.below(250);  // >= 1 bin from the edges
    const double offset = rng.uniform(-0.4, 0.4);
    const double freq = (static_cast<double>(bin) + offset) * freq_step;
    const Signal sig = sine(freq, 16000, 512);
    const ComplexGrid grid = stft(sig, cfg);
    std::size_t peak = 0;
    double best = 0.0;
    for (std::size_t b = 0; b < grid.rows; ++b) {
      if (std::abs(grid.at(b, 0)) > best) {
        best = std::abs(grid.at(b, 0));
        peak = b;
      }
    }
    CHECK(peak == bin);
  }
}

TEST_CASE("log_magnitude examples and monotonicity") {
  ComplexGrid grid;
  grid.rows = 1;
  grid.cols = 3;
  grid.values = {{1.0, 0.0}, {0.0, 0.0}, {10.0, 0.0}};
  const Spectrogram spec = log_magnitude(grid, -80.0);
  CHECK(spec.at(0, 0) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(spec.at(0, 1) == -80.0);
  CHECK(spec.at(0, 2) == doctest::Approx(20.0).epsilon(1e-9));

  Rng rng(3);
  double prev_mag = 0.0, prev_db = -80.0;
  for (int i = 0; i < 50; ++i) {
    const double mag = prev_mag + rng.uniform(0.0, 0.5);
    ComplexGrid g;
    g.rows = g.cols = 1;
    g.values = {{mag, 0.0}};
    const double db = log_magnitude(g, -80.0).at(0, 0);
    CHECK(db >= prev_db);
    prev_mag = mag;
    prev_db = db;
  }
}

TEST_CASE("resize_spectrogram identity, constants, bilinear midpoint") {
  Spectrogram spec = make_grid(4, 6, -20.0);
  const Spectrogram same = resize_spectrogram(spec, 4, 6);
  CHECK(same.values == spec.values);

  const Spectrogram bigger = resize_spectrogram(spec, 9, 13);
  for (double v : bigger.values) CHECK(v == doctest::Approx(-20.0));

  Spectrogram two = make_grid(2, 2, 0.0);
  two.values = {0.0, 10.0, 20.0, 30.0};
  const Spectrogram three = resize_spectrogram(two, 3, 3);
  CHECK(three.at(1, 1) == doctest::Approx(15.0));
  CHECK(three.at(0, 0) == doctest::Approx(0.0));
  CHECK(three.at(2, 2) == doctest::Approx(30.0));
}

TEST_CASE("resize_spectrogram stays within the input range") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Spectrogram spec = make_grid(3 + rng.below(10), 3 + rng.below(10), 0.0);
    for (auto& v : spec.values) v = rng.uniform(-80.0, 0.0);
    const Spectrogram out =
        resize_spectrogram(spec, 1 + rng.below(20), 1 + rng.below(20));
    CHECK(out.min_value() >= spec.min_value() - 1e-12);
    CHECK(out.max_value() <= spec.max_value() + 1e-12);
  }
}

TEST_CASE("downsample_mean averages blocks exactly") {
  Spectrogram spec = make_grid(4, 4, 0.0);
  for (std::size_t i = 0; i < 16; ++i) spec.values[i] = static_cast<double>(i);
  const Spectrogram out = downsample_mean(spec, 2, 2);
  CHECK(out.at(0, 0) == doctest::Approx((0 + 1 + 4 + 5) / 4.0));
  CHECK(out.at(1, 1) == doctest::Approx((10 + 11 + 14 + 15) / 4.0));
}

TEST_CASE("PGM export: degenerate range, endpoints, round-trip dims") {
  const auto path = temp_file("const.pgm");
  export_spectrogram_pgm(make_grid(3, 5, -30.0), path.string());
  const PgmImage constant = load_pgm(path.string());
  CHECK(constant.rows == 3);
  CHECK(constant.cols == 5);
  for (unsigned char p : constant.pixels) CHECK(p == 0);

  Spectrogram two = make_grid(1, 2, 0.0);
  two.values = {-80.0, 0.0};
  const auto path2 = temp_file("two.pgm");
  export_spectrogram_pgm(two, path2.string());
  const PgmImage img = load_pgm(path2.string());
  CHECK(img.pixels[0] == 0);
  CHECK(img.pixels[1] == 255);

  Rng rng(29);
  Spectrogram rand_grid = make_grid(7, 11, 0.0);
  for (auto& v : rand_grid.values) v = rng.uniform(-80.0, 0.0);
  const auto path3 = temp_file("rand.pgm");
  export_spectrogram_pgm(rand_grid, path3.string());
  const PgmImage round = load_pgm(path3.string());
  CHECK(round.rows == rand_grid.rows);
  CHECK(round.cols == rand_grid.cols);
}

TEST_CASE("PGM rows run from highest to lowest frequency") {
  Spectrogram spec = make_grid(2, 1, 0.0);
  spec.values = {-80.0, 0.0};  // row 0 = low freq = dark, row 1 = high = bright
  const auto path = temp_file("flip.pgm");
  export_spectrogram_pgm(spec, path.string());
  const PgmImage img = load_pgm(path.string());
  CHECK(img.pixels[0] == 255);  // first file row is the highest frequency
  CHECK(img.pixels[1] == 0);
}

TEST_CASE("CSV export examples and round-trip") {
  Spectrogram one = make_grid(1, 1, -80.0);
  const auto path = temp_file("one.csv");
  export_spectrogram_csv(one, path.string());
  std::ifstream f(path);
  std::string header, body;
  std::getline(f, header);
  std::getline(f, body);
  CHECK(header.rfind("# freq_step=", 0) == 0);
  CHECK(header.find("31.25") != std::string::npos);
  CHECK(body == "-80.000000");

  Rng rng(31);
  Spectrogram grid = make_grid(5, 9, 0.0);
  for (auto& v : grid.values) v = rng.uniform(-80.0, 0.0);
  const auto path2 = temp_file("grid.csv");
  export_spectrogram_csv(grid, path2.string());
  const Spectrogram back = import_spectrogram_csv(path2.string());
  REQUIRE(back.rows == grid.rows);
  REQUIRE(back.cols == grid.cols);
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    CHECK(std::fabs(back.values[i] - grid.values[i]) <= 1e-6);
  CHECK(back.freq_step == doctest::Approx(grid.freq_step));
  CHECK(back.time_step == doctest::Approx(grid.time_step));
}

TEST_CASE("stft agrees with a windowed naive DFT") {
  Rng rng(37);
  Signal sig;
  sig.sample_rate = 16000;
  for (int i = 0; i < 300; ++i) sig.samples.push_back(rng.uniform(-1.0, 1.0));

  StftConfig cfg;
  cfg.frame_len = 256;
  cfg.hop = 100;
  cfg.window = Window::kHann;
  const ComplexGrid grid = stft(sig, cfg);

  const auto w = hann_window(256);
  std::vector<double> frame(256);
  for (std::size_t i = 0; i < 256; ++i) frame[i] = sig.samples[i] * w[i];
  const auto ref = oracles::naive_dft(frame);
  for (std::size_t b = 0; b <= 128; ++b)
    CHECK(std::abs(grid.at(b, 0) - ref[b]) < 1e-8);
}
