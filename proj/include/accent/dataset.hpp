#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "accent/audio_io.hpp"
#include "accent/dsp.hpp"
#include "accent/errors.hpp"
#include "accent/rng.hpp"

namespace accent::dataset {

// Canonical internal sample rate: everything is resampled here before
// feature extraction.
inline constexpr int kCanonicalRate = 16000;

// The five classes evaluated in this toolkit, in fixed label order.
inline const std::vector<std::string> kDefaultClasses = {
    "english", "arabic", "french", "german", "hindi"};

struct SampleRecord {
  std::string file_path;
  std::string native_language;  // lowercase, trimmed
  std::string speaker_id;
  std::vector<std::pair<std::string, std::string>> extra;  // passthrough columns
};

struct Manifest {
  std::vector<SampleRecord> records;
  std::vector<std::string> class_names;  // set by filter_classes

  bool filtered() const { return !class_names.empty(); }

  std::size_t label_of(const SampleRecord& rec) const {
    for (std::size_t i = 0; i < class_names.size(); ++i)
      if (class_names[i] == rec.native_language) return i;
    throw LabelOutOfRange("Manifest: record language '" + rec.native_language +
                          "' not in class list");
  }
};

struct ManifestColumns {
  std::string filename = "filename";
  std::string language = "native_language";
  std::string speaker = "speakerid";  // optional; falls back to filename
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// RFC 4180-style CSV: quoted fields may contain commas, quotes ("" escape)
// and newlines.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&]() {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_row = [&]() {
    end_field();
    rows.push_back(row);
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_row();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (!field.empty() && field.back() == '\r') field.pop_back();
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

// Reads a CSV manifest with a header row. The filename and language columns
// are required (names configurable); every other column is preserved in
// SampleRecord::extra.
inline Manifest parse_manifest(const std::string& csv_path,
                               const ManifestColumns& cols = {}) {
  std::ifstream f(csv_path);
  if (!f) throw IoFailure("parse_manifest: cannot open " + csv_path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const auto rows = detail::parse_csv(text);
  if (rows.empty()) throw EmptyManifest("parse_manifest: empty file " + csv_path);

  const auto& header = rows[0];
  long file_idx = -1, lang_idx = -1, speaker_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = detail::trim(header[i]);
    if (name == cols.filename) file_idx = static_cast<long>(i);
    else if (name == cols.language) lang_idx = static_cast<long>(i);
    else if (name == cols.speaker) speaker_idx = static_cast<long>(i);
  }
  if (file_idx < 0)
    throw MissingColumn("parse_manifest: missing column '" + cols.filename + "'");
  if (lang_idx < 0)
    throw MissingColumn("parse_manifest: missing column '" + cols.language + "'");
  if (rows.size() == 1)
    throw EmptyManifest("parse_manifest: header-only file " + csv_path);

  Manifest m;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.size() != header.size())
      throw MalformedRow("parse_manifest: row " + std::to_string(r) + " has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(header.size()));
    SampleRecord rec;
    rec.file_path = detail::trim(fields[static_cast<std::size_t>(file_idx)]);
    rec.native_language =
        detail::lower(detail::trim(fields[static_cast<std::size_t>(lang_idx)]));
    rec.speaker_id = speaker_idx >= 0
                         ? detail::trim(fields[static_cast<std::size_t>(speaker_idx)])
                         : rec.file_path;
    if (rec.file_path.empty())
      throw MalformedRow("parse_manifest: row " + std::to_string(r) +
                         " has empty filename");
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (static_cast<long>(i) == file_idx || static_cast<long>(i) == lang_idx) continue;
      rec.extra.emplace_back(detail::trim(header[i]), fields[i]);
    }
    m.records.push_back(std::move(rec));
  }
  return m;
}

// Keeps only records whose language is in `classes`; the order of `classes`
// fixes the label indices. Classes with zero records are reported back as
// warnings, not errors.
inline Manifest filter_classes(const Manifest& manifest,
                               const std::vector<std::string>& classes,
                               std::vector<std::string>* warnings = nullptr) {
  if (classes.empty()) throw InvalidConfig("filter_classes: empty class list");
  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = i + 1; j < classes.size(); ++j)
      if (classes[i] == classes[j])
        throw InvalidConfig("filter_classes: duplicate class '" + classes[i] + "'");

  Manifest out;
  out.class_names = classes;
  for (const auto& rec : manifest.records) {
    if (std::find(classes.begin(), classes.end(), rec.native_language) != classes.end())
      out.records.push_back(rec);
  }
  if (warnings) {
    for (const auto& c : classes) {
      const bool present = std::any_of(out.records.begin(), out.records.end(),
                                       [&](const SampleRecord& r) {
                                         return r.native_language == c;
                                       });
      if (!present) warnings->push_back("class '" + c + "' has no records");
    }
  }
  return out;
}

struct Distribution {
  std::vector<std::string> class_names;
  std::vector<std::size_t> counts;
  std::vector<double> percentages;
  std::size_t total = 0;
};

inline Distribution class_distribution(const Manifest& manifest) {
  if (!manifest.filtered())
    throw InvalidConfig("class_distribution: manifest has not been filtered");
  Distribution d;
  d.class_names = manifest.class_names;
  d.counts.assign(d.class_names.size(), 0);
  for (const auto& rec : manifest.records) ++d.counts[manifest.label_of(rec)];
  d.total = manifest.records.size();
  for (std::size_t c : d.counts)
    d.percentages.push_back(d.total ? 100.0 * static_cast<double>(c) / d.total : 0.0);
  return d;
}

struct SplitResult {
  Manifest train;
  Manifest test;
  std::vector<std::string> warnings;
};

// Per-class shuffled split. Each class sends round(count * test_fraction)
// records to test, at least 1 when count >= 2 and never all of them.
// Singleton classes go wholly to train with a warning.
inline SplitResult stratified_split(const Manifest& manifest, double test_fraction,
                                    std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidConfig("stratified_split: test_fraction must be in (0, 1)");
  if (!manifest.filtered())
    throw InvalidConfig("stratified_split: manifest has not been filtered");

  SplitResult res;
  res.train.class_names = manifest.class_names;
  res.test.class_names = manifest.class_names;

  Rng rng(seed);
  for (std::size_t c = 0; c < manifest.class_names.size(); ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < manifest.records.size(); ++i)
      if (manifest.label_of(manifest.records[i]) == c) idx.push_back(i);
    rng.shuffle(idx);

    std::size_t n_test = 0;
    if (idx.size() >= 2) {
      n_test = static_cast<std::size_t>(
          std::llround(static_cast<double>(idx.size()) * test_fraction));
      n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
    } else if (idx.size() == 1) {
      res.warnings.push_back("class '" + manifest.class_names[c] +
                             "' has a single record; kept in train");
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_test ? res.test : res.train).records.push_back(manifest.records[idx[i]]);
    }
  }
  return res;
}

struct FeatureItem {
  std::string source_id;
  Spectrogram spec;
  std::size_t label = 0;
};

struct FeatureSet {
  std::vector<FeatureItem> items;
  std::vector<std::string> class_names;
  std::string dsp_key;  // StftConfig + target shape fingerprint
  std::size_t target_rows = 0;
  std::size_t target_cols = 0;
  std::string content_hash;
};

struct BuildStats {
  std::size_t files_processed = 0;
  std::size_t stft_count = 0;  // instrumented: cache hits skip the STFT
  std::size_t cache_hits = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (path, reason)
};

namespace detail {

inline void write_grid(const std::string& path, const Spectrogram& spec) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoFailure("write_grid: cannot open " + path);
  const char magic[4] = {'A', 'G', 'R', 'D'};
  f.write(magic, 4);
  const std::uint64_t dims[2] = {spec.rows, spec.cols};
  f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  const double steps[2] = {spec.time_step, spec.freq_step};
  f.write(reinterpret_cast<const char*>(steps), sizeof(steps));
  f.write(reinterpret_cast<const char*>(spec.values.data()),
          static_cast<std::streamsize>(spec.values.size() * sizeof(double)));
  if (!f) throw IoFailure("write_grid: write failed " + path);
}

inline Spectrogram read_grid(const std::string& path, const std::string& source_id) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("read_grid: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::string(magic, 4) != "AGRD")
    throw MalformedHeader("read_grid: bad magic in " + path);
  std::uint64_t dims[2];
  f.read(reinterpret_cast<char*>(dims), sizeof(dims));
  double steps[2];
  f.read(reinterpret_cast<char*>(steps), sizeof(steps));
  Spectrogram spec;
  spec.rows = dims[0];
  spec.cols = dims[1];
  spec.time_step = steps[0];
  spec.freq_step = steps[1];
  spec.source_id = source_id;
  spec.values.resize(spec.rows * spec.cols);
  f.read(reinterpret_cast<char*>(spec.values.data()),
         static_cast<std::streamsize>(spec.values.size() * sizeof(double)));
  if (!f) throw MalformedHeader("read_grid: truncated grid " + path);
  return spec;
}

inline std::string feature_key(const std::string& dsp_key, const std::string& source_id) {
  return hex64(fnv1a(source_id, fnv1a(dsp_key)));
}

}  // namespace detail

inline std::string make_dsp_key(const StftConfig& config, std::size_t target_rows,
                                std::size_t target_cols) {
  return config.cache_key() + " target=" + std::to_string(target_rows) + "x" +
         std::to_string(target_cols);
}

// Runs the full per-file pipeline (load -> resample to 16 kHz -> peak
// normalize -> STFT -> log magnitude -> resize) for each record, caching
// grids on disk. A warm cache skips the DSP chain entirely. Per-file decode
// failures are collected in stats; the call only fails if every file fails.
inline FeatureSet build_feature_set(const Manifest& manifest,
                                    const std::string& audio_dir,
                                    const StftConfig& dsp_config,
                                    std::size_t target_rows, std::size_t target_cols,
                                    const std::string& cache_dir,
                                    BuildStats* stats_out = nullptr) {
  namespace fs = std::filesystem;
  if (!manifest.filtered())
    throw InvalidConfig("build_feature_set: manifest has not been filtered");
  if (manifest.records.empty())
    throw EmptyDataset("build_feature_set: no records to process");
  dsp_config.validate();

  fs::create_directories(cache_dir);
  BuildStats stats;

  FeatureSet set;
  set.class_names = manifest.class_names;
  set.dsp_key = make_dsp_key(dsp_config, target_rows, target_cols);
  set.target_rows = target_rows;
  set.target_cols = target_cols;

  std::uint64_t hash = detail::fnv1a(set.dsp_key);

  for (const auto& rec : manifest.records) {
    ++stats.files_processed;
    const std::string key = detail::feature_key(set.dsp_key, rec.file_path);
    const fs::path grid_path = fs::path(cache_dir) / (key + ".grid");

    FeatureItem item;
    item.source_id = rec.file_path;
    item.label = manifest.label_of(rec);

    try {
      if (fs::exists(grid_path)) {
        item.spec = detail::read_grid(grid_path.string(), rec.file_path);
        ++stats.cache_hits;
      } else {
        fs::path audio_path = fs::path(audio_dir) / rec.file_path;
        if (!fs::exists(audio_path) && fs::exists(audio_path.string() + ".wav"))
          audio_path = audio_path.string() + ".wav";
        Signal sig = load_wav(audio_path.string());
        sig = resample(sig, kCanonicalRate);
        sig = normalize_peak(sig);
        ComplexGrid grid = stft(sig, dsp_config);
        ++stats.stft_count;
        Spectrogram spec = log_magnitude(grid, dsp_config.floor_db);
        item.spec = resize_spectrogram(spec, target_rows, target_cols);
        item.spec.source_id = rec.file_path;
        detail::write_grid(grid_path.string(), item.spec);
      }
      hash = detail::fnv1a(rec.file_path, hash);
      set.items.push_back(std::move(item));
    } catch (const Error& e) {
      stats.failures.emplace_back(rec.file_path, e.what());
    }
  }

  if (set.items.empty())
    throw TotalDecodeFailure("build_feature_set: every file failed to decode (" +
                             std::to_string(stats.failures.size()) + " failures)");

  set.content_hash = detail::hex64(hash);

  // Single-writer index update, written once per build.
  nlohmann::ordered_json index;
  index["version"] = 1;
  index["dsp_key"] = set.dsp_key;
  index["target"] = {target_rows, target_cols};
  index["class_names"] = set.class_names;
  index["content_hash"] = set.content_hash;
  auto items = nlohmann::ordered_json::array();
  for (const auto& item : set.items) {
    items.push_back({{"source_id", item.source_id},
                     {"label", item.label},
                     {"grid", detail::feature_key(set.dsp_key, item.source_id) + ".grid"}});
  }
  index["items"] = items;
  std::ofstream idx(fs::path(cache_dir) / "index.json");
  if (!idx) throw IoFailure("build_feature_set: cannot write index.json");
  idx << index.dump(2) << '\n';

  if (stats_out) *stats_out = stats;
  return set;
}

// Reloads a cache directory written by build_feature_set.
inline FeatureSet load_feature_set(const std::string& cache_dir) {
  namespace fs = std::filesystem;
  const fs::path idx_path = fs::path(cache_dir) / "index.json";
  std::ifstream f(idx_path);
  if (!f) throw IoFailure("load_feature_set: cannot open " + idx_path.string());
  nlohmann::json index = nlohmann::json::parse(f);

  FeatureSet set;
  set.dsp_key = index.at("dsp_key").get<std::string>();
  set.class_names = index.at("class_names").get<std::vector<std::string>>();
  set.target_rows = index.at("target")[0].get<std::size_t>();
  set.target_cols = index.at("target")[1].get<std::size_t>();
  set.content_hash = index.at("content_hash").get<std::string>();
  for (const auto& j : index.at("items")) {
    FeatureItem item;
    item.source_id = j.at("source_id").get<std::string>();
    item.label = j.at("label").get<std::size_t>();
    const fs::path grid = fs::path(cache_dir) / j.at("grid").get<std::string>();
    item.spec = detail::read_grid(grid.string(), item.source_id);
    set.items.push_back(std::move(item));
  }
  if (set.items.empty()) throw EmptyDataset("load_feature_set: empty cache");
  return set;
}

// Synthetic five-band fixture standing in for real archive audio in tests.
//
// Each class paints the same two frequency bands; their energies swing in
// anti-phase over time with a class-specific phase offset (period 4
// columns). Averaged over any full period the bands look identical for
// every class, so coarse block-averaged views carry no class signal while
// the full-resolution grid separates all classes. Gaussian dB noise with
// sigma = noise_db is added on top and clamped at the floor.
inline FeatureSet synth_dataset(std::size_t num_classes, std::size_t per_class,
                                double noise_db, std::uint64_t seed,
                                std::size_t rows = 128, std::size_t cols = 128) {
  if (num_classes < 2) throw InvalidConfig("synth_dataset: need >= 2 classes");
  if (per_class < 1) throw InvalidConfig("synth_dataset: per_class must be >= 1");
  if (noise_db < 0.0) throw InvalidConfig("synth_dataset: noise_db must be >= 0");

  constexpr double kFloor = -80.0;
  constexpr double kAmp = 80.0;
  const std::size_t band_w = rows / 4;
  const std::size_t band_a = rows / 8;
  const std::size_t band_b = (5 * rows) / 8;

  FeatureSet set;
  for (std::size_t k = 0; k < num_classes; ++k)
    set.class_names.push_back("synth" + std::to_string(k));
  set.target_rows = rows;
  set.target_cols = cols;
  set.dsp_key = "synth classes=" + std::to_string(num_classes) +
                " noise=" + std::to_string(noise_db);

  Rng rng(seed);
  std::uint64_t hash = detail::fnv1a(set.dsp_key);

  for (std::size_t k = 0; k < num_classes; ++k) {
    const double phase = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(num_classes);
    for (std::size_t i = 0; i < per_class; ++i) {
      FeatureItem item;
      item.label = k;
      item.source_id = "synth/c" + std::to_string(k) + "/i" + std::to_string(i);
      Spectrogram& spec = item.spec;
      spec.rows = rows;
      spec.cols = cols;
      spec.values.assign(rows * cols, kFloor);
      spec.time_step = 0.01;
      spec.freq_step = rows > 1 ? 8000.0 / static_cast<double>(rows - 1) : 8000.0;
      spec.source_id = item.source_id;

      for (std::size_t t = 0; t < cols; ++t) {
        const double m = 0.5 + 0.5 * std::cos(2.0 * kPi * static_cast<double>(t) / 4.0 + phase);
        const double a_val = kFloor + kAmp * m;
        const double b_val = kFloor + kAmp * (1.0 - m);
        for (std::size_t r = band_a; r < band_a + band_w; ++r) spec.at(r, t) = a_val;
        for (std::size_t r = band_b; r < band_b + band_w; ++r) spec.at(r, t) = b_val;
      }
      if (noise_db > 0.0) {
        for (double& v : spec.values)
          v = std::max(kFloor, v + noise_db * rng.gaussian());
      }
      hash = detail::fnv1a(item.source_id, hash);
      set.items.push_back(std::move(item));
    }
  }
  set.content_hash = detail::hex64(hash);
  return set;
}

// Splits a FeatureSet the same stratified way stratified_split treats
// manifests. Used for synthetic fixtures that never touch a manifest.
inline std::pair<FeatureSet, FeatureSet> split_feature_set(const FeatureSet& set,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidConfig("split_feature_set: test_fraction must be in (0, 1)");
  FeatureSet train = set, test = set;
  train.items.clear();
  test.items.clear();
  Rng rng(seed);
  for (std::size_t c = 0; c < set.class_names.size(); ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < set.items.size(); ++i)
      if (set.items[i].label == c) idx.push_back(i);
    rng.shuffle(idx);
    std::size_t n_test = 0;
    if (idx.size() >= 2) {
      n_test = static_cast<std::size_t>(
          std::llround(static_cast<double>(idx.size()) * test_fraction));
      n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
    }
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < n_test ? test : train).items.push_back(set.items[idx[i]]);
  }
  return {train, test};
}

// Persists an in-memory FeatureSet as a cache directory (same layout as
// build_feature_set), so the CLI can prepare synthetic fixtures.
inline void save_feature_set(const FeatureSet& set, const std::string& cache_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(cache_dir);
  nlohmann::ordered_json index;
  index["version"] = 1;
  index["dsp_key"] = set.dsp_key;
  index["target"] = {set.target_rows, set.target_cols};
  index["class_names"] = set.class_names;
  index["content_hash"] = set.content_hash;
  auto items = nlohmann::ordered_json::array();
  for (const auto& item : set.items) {
    const std::string grid_name = detail::feature_key(set.dsp_key, item.source_id) + ".grid";
    detail::write_grid((fs::path(cache_dir) / grid_name).string(), item.spec);
    items.push_back({{"source_id", item.source_id},
                     {"label", item.label},
                     {"grid", grid_name}});
  }
  index["items"] = items;
  std::ofstream idx(fs::path(cache_dir) / "index.json");
  if (!idx) throw IoFailure("save_feature_set: cannot write index.json");
  idx << index.dump(2) << '\n';
}

}  // namespace accent::dataset
