#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "accent/dsp.hpp"
#include "accent/errors.hpp"

namespace accent::analysis {

enum class Category { kVowel, kStress, kConsonant };

inline const char* category_name(Category c) {
  switch (c) {
    case Category::kVowel: return "vowel";
    case Category::kStress: return "stress";
    default: return "consonant";
  }
}

// One systematic French-accent pronunciation habit, with a word-level
// example pair (standard English form, French-accented rendering).
struct IdiosyncrasyDescriptor {
  std::string id;
  Category category = Category::kVowel;
  std::string description;
  std::pair<std::string, std::string> example_pair;
};

// Built-in catalog: 7 vowel habits, 3 stress/syllabification habits and
// 5 consonant habits.
inline std::vector<IdiosyncrasyDescriptor> load_catalog() {
  return {
      {"vowel_short_a", Category::kVowel,
       "short A shifts to an open 'ah' vowel", {"fat", "faht"}},
      {"vowel_long_a_consonant", Category::kVowel,
       "long A before a consonant flattens to a short e", {"gate", "get"}},
      {"vowel_er_word_end", Category::kVowel,
       "word-final ER becomes 'air'", {"water", "watair"}},
      {"vowel_short_i", Category::kVowel,
       "short I lengthens to 'ee'", {"sip", "seep"}},
      {"vowel_long_i", Category::kVowel,
       "long I splits into two syllables", {"kite", "ka-it"}},
      {"vowel_short_o", Category::kVowel,
       "short O moves toward 'uh' or 'oh'", {"cot", "cut"}},
      {"vowel_u_full", Category::kVowel,
       "the U of 'full' rounds to 'oo'", {"full", "fool"}},

      {"stress_schwas_pronounced", Category::kStress,
       "unstressed schwas are given full vowel quality", {"reminder", "ree-ma-een-dair"}},
      {"stress_short_words_full", Category::kStress,
       "function words are fully articulated instead of reduced",
       {"peanut butter and jelly", "peanoot boo-tair and jelly"}},
      {"stress_equal_or_final", Category::kStress,
       "syllables carry even stress or the last syllable is stressed",
       {"computer", "com-pu-TAIR"}},

      {"consonant_h_silent", Category::kConsonant,
       "word-initial H is dropped", {"happy", "appy"}},
      {"consonant_j_zh", Category::kConsonant,
       "J softens to 'zh'", {"jam", "zham"}},
      {"consonant_r_variant", Category::kConsonant,
       "R is uvular or glides between W and L, sometimes with an inserted H",
       {"arm", "hahrm"}},
      {"voiced_th_z", Category::kConsonant,
       "voiced TH hardens to Z or DZ", {"these", "zees"}},
      {"unvoiced_th_s", Category::kConsonant,
       "unvoiced TH hardens to S or T", {"thin", "seen"}},
  };
}

inline const IdiosyncrasyDescriptor& lookup_descriptor(
    const std::vector<IdiosyncrasyDescriptor>& catalog, const std::string& id) {
  for (const auto& d : catalog)
    if (d.id == id) return d;
  throw OutOfRange("lookup_descriptor: unknown id '" + id + "'");
}

// Columns whose frame-start time t*time_step falls in [t0, t1).
inline Spectrogram extract_segment(const Spectrogram& spec, double t0, double t1) {
  const double duration = spec.duration_seconds();
  if (!(t0 >= 0.0 && t0 < t1 && t1 <= duration + 1e-12))
    throw OutOfRange("extract_segment: window [" + std::to_string(t0) + ", " +
                     std::to_string(t1) + ") outside [0, " +
                     std::to_string(duration) + "]");
  const std::size_t c0 = static_cast<std::size_t>(std::ceil(t0 / spec.time_step - 1e-9));
  std::size_t c1 = static_cast<std::size_t>(std::ceil(t1 / spec.time_step - 1e-9));
  c1 = std::min(c1, spec.cols);
  if (c0 >= c1) throw EmptySegment("extract_segment: no columns in window");

  Spectrogram out;
  out.rows = spec.rows;
  out.cols = c1 - c0;
  out.time_step = spec.time_step;
  out.freq_step = spec.freq_step;
  out.source_id = spec.source_id;
  out.values.resize(out.rows * out.cols);
  for (std::size_t r = 0; r < spec.rows; ++r)
    for (std::size_t c = c0; c < c1; ++c) out.at(r, c - c0) = spec.at(r, c);
  return out;
}

// Per-column mean dB over all frequency rows.
inline std::vector<double> frame_energy_profile(const Spectrogram& spec) {
  if (spec.rows == 0 || spec.cols == 0)
    throw EmptySegment("frame_energy_profile: empty spectrogram");
  std::vector<double> profile(spec.cols, 0.0);
  for (std::size_t r = 0; r < spec.rows; ++r)
    for (std::size_t c = 0; c < spec.cols; ++c) profile[c] += spec.at(r, c);
  for (double& v : profile) v /= static_cast<double>(spec.rows);
  return profile;
}

// Tail-to-body mean power ratio. dB cells are converted to linear power
// before averaging, so a constant dB offset cancels exactly. The tail is
// the last ceil(tail_fraction * cols) columns (always leaving at least one
// body column).
inline double terminal_energy_ratio(const Spectrogram& segment, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw InvalidConfig("terminal_energy_ratio: tail_fraction must be in (0, 1)");
  if (segment.cols < 2 || segment.rows == 0)
    throw EmptySegment("terminal_energy_ratio: need at least 2 columns");

  std::size_t tail_cols = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(segment.cols) - 1e-9));
  tail_cols = std::clamp<std::size_t>(tail_cols, 1, segment.cols - 1);
  const std::size_t body_cols = segment.cols - tail_cols;

  double tail_power = 0.0, body_power = 0.0;
  for (std::size_t r = 0; r < segment.rows; ++r) {
    for (std::size_t c = 0; c < segment.cols; ++c) {
      const double p = std::pow(10.0, segment.at(r, c) / 10.0);
      (c < body_cols ? body_power : tail_power) += p;
    }
  }
  tail_power /= static_cast<double>(tail_cols * segment.rows);
  body_power /= static_cast<double>(body_cols * segment.rows);
  return tail_power / body_power;
}

struct WordWindow {
  double t0 = 0.0;
  double t1 = 0.0;
  std::string label;
};

struct WordStats {
  std::string label;
  double t0 = 0.0, t1 = 0.0;
  double mean_db = 0.0;
  double peak_db = 0.0;
};

struct EmphasisProfile {
  std::vector<WordStats> words;
  // contrast[i][j] = mean_db of word i minus mean_db of word j
  std::vector<std::vector<double>> contrast;
};

// Per-word mean and peak of the frame energy profile, plus the pairwise
// mean-contrast matrix.
inline EmphasisProfile emphasis_profile(const Spectrogram& spec,
                                        const std::vector<WordWindow>& words) {
  const double duration = spec.duration_seconds();
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (!(w.t0 >= 0.0 && w.t0 < w.t1 && w.t1 <= duration + 1e-12))
      throw OutOfRange("emphasis_profile: window '" + w.label + "' out of range");
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      if (w.t0 < words[j].t1 && words[j].t0 < w.t1)
        throw OutOfRange("emphasis_profile: windows '" + w.label + "' and '" +
                         words[j].label + "' overlap");
    }
  }

  const std::vector<double> profile = frame_energy_profile(spec);
  EmphasisProfile out;
  for (const auto& w : words) {
    const std::size_t c0 =
        static_cast<std::size_t>(std::ceil(w.t0 / spec.time_step - 1e-9));
    std::size_t c1 = static_cast<std::size_t>(std::ceil(w.t1 / spec.time_step - 1e-9));
    c1 = std::min(c1, spec.cols);
    if (c0 >= c1) throw EmptySegment("emphasis_profile: window '" + w.label +
                                     "' spans no columns");
    WordStats stats;
    stats.label = w.label;
    stats.t0 = w.t0;
    stats.t1 = w.t1;
    stats.peak_db = profile[c0];
    double acc = 0.0;
    for (std::size_t c = c0; c < c1; ++c) {
      acc += profile[c];
      stats.peak_db = std::max(stats.peak_db, profile[c]);
    }
    stats.mean_db = acc / static_cast<double>(c1 - c0);
    out.words.push_back(stats);
  }
  out.contrast.assign(words.size(), std::vector<double>(words.size(), 0.0));
  for (std::size_t i = 0; i < out.words.size(); ++i)
    for (std::size_t j = 0; j < out.words.size(); ++j)
      out.contrast[i][j] = out.words[i].mean_db - out.words[j].mean_db;
  return out;
}

struct BandStat {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
  double mean_delta = 0.0;
  double max_abs_delta = 0.0;
};

struct SegmentComparison {
  std::string a_id;
  std::string b_id;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> difference;  // a - b after aligning b to a's columns
  std::vector<BandStat> per_band_stats;
  double terminal_ratio_a = 0.0;
  double terminal_ratio_b = 0.0;

  double diff_at(std::size_t r, std::size_t c) const { return difference[r * cols + c]; }
};

// Aligns b to a's column count by linear interpolation over time, then
// reports the dB difference grid, stats over equal-width frequency bands
// and the terminal energy ratio of each original segment.
inline SegmentComparison compare_segments(const Spectrogram& a, const Spectrogram& b,
                                          double tail_fraction = 0.2,
                                          std::size_t num_bands = 8) {
  if (a.rows == 0 || a.cols == 0 || b.rows == 0 || b.cols == 0)
    throw EmptySegment("compare_segments: empty input");
  if (a.rows != b.rows || std::fabs(a.freq_step - b.freq_step) >
                              1e-9 * std::max(std::fabs(a.freq_step), 1.0))
    throw ConfigMismatch("compare_segments: inputs come from different DSP configs");
  if (num_bands == 0) throw InvalidConfig("compare_segments: num_bands must be >= 1");

  const Spectrogram b_aligned = resize_spectrogram(b, a.rows, a.cols);

  SegmentComparison cmp;
  cmp.a_id = a.source_id;
  cmp.b_id = b.source_id;
  cmp.rows = a.rows;
  cmp.cols = a.cols;
  cmp.difference.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    cmp.difference[i] = a.values[i] - b_aligned.values[i];

  const double nyquist = a.nyquist_hz();
  for (std::size_t band = 0; band < num_bands; ++band) {
    BandStat stat;
    stat.lo_hz = nyquist * static_cast<double>(band) / static_cast<double>(num_bands);
    stat.hi_hz = nyquist * static_cast<double>(band + 1) / static_cast<double>(num_bands);
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < a.rows; ++r) {
      const double freq = static_cast<double>(r) * a.freq_step;
      const bool in_band = band + 1 == num_bands ? (freq >= stat.lo_hz)
                                                 : (freq >= stat.lo_hz && freq < stat.hi_hz);
      if (!in_band) continue;
      for (std::size_t c = 0; c < a.cols; ++c) {
        const double d = cmp.diff_at(r, c);
        acc += d;
        stat.max_abs_delta = std::max(stat.max_abs_delta, std::fabs(d));
        ++count;
      }
    }
    if (count > 0) stat.mean_delta = acc / static_cast<double>(count);
    cmp.per_band_stats.push_back(stat);
  }

  cmp.terminal_ratio_a = terminal_energy_ratio(a, tail_fraction);
  cmp.terminal_ratio_b = terminal_energy_ratio(b, tail_fraction);
  return cmp;
}

inline nlohmann::ordered_json comparison_to_json(const SegmentComparison& cmp) {
  nlohmann::ordered_json j;
  j["a_id"] = cmp.a_id;
  j["b_id"] = cmp.b_id;
  j["rows"] = cmp.rows;
  j["cols"] = cmp.cols;
  j["terminal_ratio_a"] = cmp.terminal_ratio_a;
  j["terminal_ratio_b"] = cmp.terminal_ratio_b;
  auto bands = nlohmann::ordered_json::array();
  for (const auto& b : cmp.per_band_stats) {
    bands.push_back({{"lo_hz", b.lo_hz},
                     {"hi_hz", b.hi_hz},
                     {"mean_delta", b.mean_delta},
                     {"max_abs_delta", b.max_abs_delta}});
  }
  j["bands"] = bands;
  return j;
}

inline nlohmann::ordered_json catalog_to_json() {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& d : load_catalog()) {
    arr.push_back({{"id", d.id},
                   {"category", category_name(d.category)},
                   {"description", d.description},
                   {"example_pair", {d.example_pair.first, d.example_pair.second}}});
  }
  return arr;
}

}  // namespace accent::analysis
