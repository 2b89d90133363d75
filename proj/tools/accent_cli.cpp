// accent: command-line front end for the accent-recognition toolkit.
//
// Subcommands: prepare, train, evaluate, spectrogram, compare.
// Exit codes: 0 success, 2 config/usage error, 3 missing or unreadable
// input, 4 internal shape error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "accent/analysis.hpp"
#include "accent/audio_io.hpp"
#include "accent/dataset.hpp"
#include "accent/dsp.hpp"
#include "accent/metrics.hpp"
#include "accent/models.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  bool timestamps = false;
};

// Flat JSON config file; command-line flags win over file values.
json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw accent::IoFailure("cannot open config file " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw accent::InvalidConfig("config file " + path + ": " + e.what());
  }
}

template <typename T>
void merge_option(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
  if (opt != nullptr && opt->count() > 0) return;  // explicit flag wins
  if (cfg.contains(key)) {
    try {
      value = cfg.at(key).get<T>();
    } catch (const json::exception&) {
      throw accent::InvalidConfig(std::string("config key '") + key +
                                  "' has the wrong type");
    }
  }
}

accent::StftConfig make_stft_config(std::size_t frame_len, std::size_t hop,
                                    const std::string& window, double floor_db) {
  accent::StftConfig cfg;
  cfg.frame_len = frame_len;
  cfg.hop = hop;
  cfg.floor_db = floor_db;
  if (window == "hann") cfg.window = accent::Window::kHann;
  else if (window == "rectangular") cfg.window = accent::Window::kRectangular;
  else throw accent::InvalidConfig("unknown window '" + window + "'");
  cfg.validate();
  return cfg;
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    std::string item = s.substr(start, comma - start);
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw accent::IoFailure("cannot write " + path.string());
  f << text;
}

void write_json_file(const fs::path& path, const ordered_json& j) {
  std::ofstream f(path);
  if (!f) throw accent::IoFailure("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

void maybe_stamp(ordered_json& j, bool timestamps) {
  if (timestamps) j["generated_at"] = static_cast<long long>(::time(nullptr));
}

accent::Spectrogram spectrogram_of_file(const std::string& path,
                                        const accent::StftConfig& stft_cfg) {
  accent::Signal sig = accent::load_wav(path);
  sig = accent::resample(sig, accent::dataset::kCanonicalRate);
  sig = accent::normalize_peak(sig);
  accent::ComplexGrid grid = accent::stft(sig, stft_cfg);
  return accent::log_magnitude(grid, stft_cfg.floor_db);
}

std::vector<accent::analysis::WordWindow> load_words(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw accent::IoFailure("cannot open words file " + path);
  json j = json::parse(f);
  std::vector<accent::analysis::WordWindow> words;
  for (const auto& e : j) {
    accent::analysis::WordWindow w;
    w.t0 = e.at("t0").get<double>();
    w.t1 = e.at("t1").get<double>();
    w.label = e.value("label", "word" + std::to_string(words.size()));
    words.push_back(w);
  }
  return words;
}

ordered_json emphasis_to_json(const accent::analysis::EmphasisProfile& prof) {
  ordered_json j;
  auto words = ordered_json::array();
  for (const auto& w : prof.words) {
    words.push_back({{"label", w.label},
                     {"t0", w.t0},
                     {"t1", w.t1},
                     {"mean_db", w.mean_db},
                     {"peak_db", w.peak_db}});
  }
  j["words"] = words;
  j["contrast"] = prof.contrast;
  return j;
}

// ---------------------------------------------------------------------------

struct PrepareArgs {
  CommonArgs common;
  std::string manifest_path;
  std::string audio_dir;
  std::string classes_csv = "english,arabic,french,german,hindi";
  std::string filename_col = "filename";
  std::string language_col = "native_language";
  double test_fraction = 0.2;
  std::size_t rows = 128, cols = 128;
  std::size_t frame_len = 512, hop = 160;
  std::string window = "hann";
  double floor_db = -80.0;
  // synthetic-fixture mode
  std::size_t synth_per_class = 0;
  std::size_t synth_classes = 5;
  double noise_db = 6.0;
};

ordered_json distribution_json(const accent::dataset::Distribution& dist) {
  ordered_json j;
  auto classes = ordered_json::array();
  for (std::size_t i = 0; i < dist.class_names.size(); ++i) {
    classes.push_back({{"name", dist.class_names[i]},
                       {"count", dist.counts[i]},
                       {"percent", dist.percentages[i]}});
  }
  j["classes"] = classes;
  j["total"] = dist.total;
  return j;
}

std::string distribution_text(const accent::dataset::Distribution& dist) {
  std::string out = "Class distribution\n";
  char buf[128];
  for (std::size_t i = 0; i < dist.class_names.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "  %-12s %6zu  %6.2f%%\n",
                  dist.class_names[i].c_str(), dist.counts[i], dist.percentages[i]);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "  total        %6zu\n", dist.total);
  out += buf;
  return out;
}

void write_manifest_csv(const accent::dataset::Manifest& m, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw accent::IoFailure("cannot write " + path.string());
  f << "filename,native_language,speakerid\n";
  for (const auto& rec : m.records)
    f << rec.file_path << ',' << rec.native_language << ',' << rec.speaker_id << '\n';
}

int cmd_prepare(const PrepareArgs& args) {
  fs::create_directories(args.common.out_dir);
  const fs::path out(args.common.out_dir);

  accent::dataset::Distribution dist;
  accent::dataset::BuildStats train_stats, test_stats;

  if (args.synth_per_class > 0) {
    auto set = accent::dataset::synth_dataset(args.synth_classes, args.synth_per_class,
                                              args.noise_db, args.common.seed,
                                              args.rows, args.cols);
    auto [train, test] =
        accent::dataset::split_feature_set(set, args.test_fraction, args.common.seed);
    accent::dataset::save_feature_set(train, (out / "train_cache").string());
    accent::dataset::save_feature_set(test, (out / "test_cache").string());

    dist.class_names = set.class_names;
    dist.counts.assign(set.class_names.size(), 0);
    for (const auto& item : set.items) ++dist.counts[item.label];
    dist.total = set.items.size();
    for (std::size_t c : dist.counts)
      dist.percentages.push_back(100.0 * static_cast<double>(c) /
                                 static_cast<double>(dist.total));
    std::cout << "prepared synthetic fixture: " << train.items.size() << " train / "
              << test.items.size() << " test\n";
  } else {
    if (args.manifest_path.empty())
      throw accent::InvalidConfig("prepare: --manifest is required (or --synth-per-class)");
    accent::dataset::ManifestColumns cols;
    cols.filename = args.filename_col;
    cols.language = args.language_col;
    auto manifest = accent::dataset::parse_manifest(args.manifest_path, cols);

    std::vector<std::string> warnings;
    auto filtered = accent::dataset::filter_classes(
        manifest, split_csv_list(args.classes_csv), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    dist = accent::dataset::class_distribution(filtered);
    auto split =
        accent::dataset::stratified_split(filtered, args.test_fraction, args.common.seed);
    for (const auto& w : split.warnings) std::cerr << "warning: " << w << "\n";
    write_manifest_csv(split.train, out / "train_manifest.csv");
    write_manifest_csv(split.test, out / "test_manifest.csv");

    const auto stft_cfg =
        make_stft_config(args.frame_len, args.hop, args.window, args.floor_db);
    accent::dataset::build_feature_set(split.train, args.audio_dir, stft_cfg, args.rows,
                                       args.cols, (out / "train_cache").string(),
                                       &train_stats);
    accent::dataset::build_feature_set(split.test, args.audio_dir, stft_cfg, args.rows,
                                       args.cols, (out / "test_cache").string(),
                                       &test_stats);
    for (const auto& [path, reason] : train_stats.failures)
      std::cerr << "decode failure (train): " << path << ": " << reason << "\n";
    for (const auto& [path, reason] : test_stats.failures)
      std::cerr << "decode failure (test): " << path << ": " << reason << "\n";
    if (train_stats.cache_hits + test_stats.cache_hits > 0)
      std::cout << "cache hit: " << train_stats.cache_hits + test_stats.cache_hits
                << " grids reused\n";
    std::cout << "prepared " << split.train.records.size() << " train / "
              << split.test.records.size() << " test records\n";
  }

  write_text_file(out / "distribution.txt", distribution_text(dist));
  ordered_json dist_json = distribution_json(dist);
  maybe_stamp(dist_json, args.common.timestamps);
  write_json_file(out / "distribution.json", dist_json);
  std::cout << distribution_text(dist);
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  CommonArgs common;
  std::string cache_dir;
  std::string val_cache_dir;
  std::string model = "cnn2";
  double lr = 0.01;
  double momentum = 0.9;
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  double lambda = 1e-4;
  std::size_t dense_width = 128;
  double stop_train_loss = 0.0;
  double stop_val_acc = 0.0;
};

ordered_json history_to_json(const accent::models::TrainHistory& history) {
  auto epochs = ordered_json::array();
  for (const auto& rec : history) {
    ordered_json e;
    e["train_loss"] = rec.train_loss;
    e["train_accuracy"] = rec.train_accuracy;
    if (rec.val_accuracy) e["val_accuracy"] = *rec.val_accuracy;
    else e["val_accuracy"] = nullptr;
    epochs.push_back(e);
  }
  ordered_json j;
  j["epochs"] = epochs;
  return j;
}

int cmd_train(const TrainArgs& args) {
  if (!fs::exists(fs::path(args.cache_dir) / "index.json"))
    throw accent::IoFailure("train: no prepared cache at " + args.cache_dir);
  auto train_set = accent::dataset::load_feature_set(args.cache_dir);
  accent::dataset::FeatureSet val_set;
  val_set.class_names = train_set.class_names;
  if (!args.val_cache_dir.empty())
    val_set = accent::dataset::load_feature_set(args.val_cache_dir);

  fs::create_directories(args.common.out_dir);
  const fs::path out(args.common.out_dir);
  const fs::path ckpt_path = out / "checkpoint.bin";

  ordered_json history_json;
  std::string summary;

  if (args.model == "svm") {
    accent::models::SvmConfig cfg;
    cfg.lambda = args.lambda;
    cfg.epochs = args.epochs;
    cfg.seed = args.common.seed;
    std::vector<std::vector<double>> features;
    std::vector<std::size_t> labels;
    for (const auto& item : train_set.items) {
      features.push_back(accent::models::svm_features(item.spec, cfg));
      labels.push_back(item.label);
    }
    auto model = accent::models::train_svm_ovr(features, labels, cfg,
                                               train_set.class_names);
    accent::models::save_checkpoint(model, ckpt_path.string());

    std::size_t correct = 0;
    for (std::size_t i = 0; i < features.size(); ++i)
      if (accent::models::svm_predict(model, features[i]).label == labels[i]) ++correct;
    const double train_acc =
        static_cast<double>(correct) / static_cast<double>(features.size());
    history_json["epochs"] = ordered_json::array();
    history_json["final"] = {{"train_accuracy", train_acc}};
    char buf[160];
    std::snprintf(buf, sizeof(buf), "model=svm epochs=%zu train_acc=%.4f checkpoint=%s",
                  args.epochs, train_acc, ckpt_path.string().c_str());
    summary = buf;
  } else {
    accent::models::CnnConfig cfg;
    cfg.variant = args.model;
    cfg.input_shape = {1, train_set.target_rows, train_set.target_cols};
    cfg.num_classes = train_set.class_names.size();
    cfg.lr = args.lr;
    cfg.momentum = args.momentum;
    cfg.epochs = args.epochs;
    cfg.batch_size = args.batch_size;
    cfg.seed = args.common.seed;
    cfg.dense_width = args.dense_width;
    cfg.stop_at_train_loss = args.stop_train_loss;
    cfg.stop_at_val_accuracy = args.stop_val_acc;

    auto model = accent::models::build_cnn(cfg);
    auto history = accent::models::train(model, train_set, val_set);
    accent::models::save_checkpoint(model, ckpt_path.string());
    history_json = history_to_json(history);

    char buf[240];
    if (!history.empty()) {
      const auto& last = history.back();
      if (last.val_accuracy)
        std::snprintf(buf, sizeof(buf),
                      "model=%s epochs=%zu train_loss=%.5f train_acc=%.4f "
                      "val_acc=%.4f checkpoint=%s",
                      args.model.c_str(), history.size(), last.train_loss,
                      last.train_accuracy, *last.val_accuracy, ckpt_path.string().c_str());
      else
        std::snprintf(buf, sizeof(buf),
                      "model=%s epochs=%zu train_loss=%.5f train_acc=%.4f checkpoint=%s",
                      args.model.c_str(), history.size(), last.train_loss,
                      last.train_accuracy, ckpt_path.string().c_str());
    } else {
      std::snprintf(buf, sizeof(buf), "model=%s epochs=0 checkpoint=%s",
                    args.model.c_str(), ckpt_path.string().c_str());
    }
    summary = buf;
  }

  maybe_stamp(history_json, args.common.timestamps);
  write_json_file(out / "history.json", history_json);
  std::cout << summary << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  CommonArgs common;
  std::string checkpoint_path;
  std::string cache_dir;
  double beta = 1.0;
};

int cmd_evaluate(const EvaluateArgs& args) {
  if (!fs::exists(args.checkpoint_path))
    throw accent::IoFailure("evaluate: missing checkpoint " + args.checkpoint_path);
  if (!fs::exists(fs::path(args.cache_dir) / "index.json"))
    throw accent::IoFailure("evaluate: no prepared cache at " + args.cache_dir);

  auto test_set = accent::dataset::load_feature_set(args.cache_dir);
  std::vector<std::size_t> truth, predicted;

  const std::string kind = accent::models::checkpoint_kind(args.checkpoint_path);
  std::vector<std::string> class_names;
  if (kind == "svm") {
    auto model = accent::models::load_svm_checkpoint(args.checkpoint_path);
    class_names = model.class_names;
    for (const auto& item : test_set.items) {
      truth.push_back(item.label);
      predicted.push_back(
          accent::models::svm_predict(model, accent::models::svm_features(item.spec,
                                                                          model.config))
              .label);
    }
  } else {
    auto model = accent::models::load_cnn_checkpoint(args.checkpoint_path);
    class_names = model.class_names;
    for (const auto& item : test_set.items) {
      truth.push_back(item.label);
      predicted.push_back(
          accent::models::argmax(accent::models::predict(model, item.spec)));
    }
  }
  if (class_names.empty()) class_names = test_set.class_names;

  auto cm = accent::metrics::confusion_matrix(truth, predicted, class_names.size(),
                                              class_names);
  auto report = accent::metrics::evaluation_report(cm, args.beta);

  fs::create_directories(args.common.out_dir);
  const fs::path out(args.common.out_dir);
  const std::string text = accent::metrics::render_text(report);
  write_text_file(out / "report.txt", text);

  ordered_json j = accent::metrics::report_to_json(report);
  j["confusion_matrix"] = cm.counts;
  maybe_stamp(j, args.common.timestamps);
  write_json_file(out / "report.json", j);

  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------------------

struct SpectrogramArgs {
  CommonArgs common;
  std::string in_path;
  std::string out_pgm;
  std::string out_csv;
  std::size_t frame_len = 512, hop = 160;
  std::string window = "hann";
  double floor_db = -80.0;
};

int cmd_spectrogram(const SpectrogramArgs& args) {
  if (args.out_pgm.empty() && args.out_csv.empty())
    throw accent::InvalidConfig("spectrogram: need --out-pgm and/or --out-csv");
  const auto stft_cfg =
      make_stft_config(args.frame_len, args.hop, args.window, args.floor_db);
  const accent::Spectrogram spec = spectrogram_of_file(args.in_path, stft_cfg);
  if (!args.out_pgm.empty()) accent::export_spectrogram_pgm(spec, args.out_pgm);
  if (!args.out_csv.empty()) accent::export_spectrogram_csv(spec, args.out_csv);
  std::cout << "spectrogram: " << spec.rows << " bins x " << spec.cols << " frames ("
            << spec.freq_step << " Hz/bin, " << spec.time_step << " s/frame)\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  CommonArgs common;
  std::string a_path, b_path;
  double t0_a = 0.0, t1_a = 0.0;
  double t0_b = 0.0, t1_b = 0.0;
  double tail = 0.2;
  std::size_t bands = 8;
  std::string words_a_path;
  std::string words_b_path;
  std::string out_json;  // defaults to <out>/comparison.json
  std::string diff_pgm;
  std::size_t frame_len = 512, hop = 160;
  std::string window = "hann";
  double floor_db = -80.0;
};

int cmd_compare(const CompareArgs& args) {
  std::string out_json = args.out_json;
  if (out_json.empty()) {
    fs::create_directories(args.common.out_dir);
    out_json = (fs::path(args.common.out_dir) / "comparison.json").string();
  }
  const auto stft_cfg =
      make_stft_config(args.frame_len, args.hop, args.window, args.floor_db);
  const accent::Spectrogram spec_a = spectrogram_of_file(args.a_path, stft_cfg);
  const accent::Spectrogram spec_b = spectrogram_of_file(args.b_path, stft_cfg);

  const accent::Spectrogram seg_a =
      args.t1_a > 0.0 ? accent::analysis::extract_segment(spec_a, args.t0_a, args.t1_a)
                      : spec_a;
  const accent::Spectrogram seg_b =
      args.t1_b > 0.0 ? accent::analysis::extract_segment(spec_b, args.t0_b, args.t1_b)
                      : spec_b;

  const auto cmp = accent::analysis::compare_segments(seg_a, seg_b, args.tail, args.bands);
  ordered_json j = accent::analysis::comparison_to_json(cmp);

  if (!args.words_a_path.empty()) {
    j["emphasis_a"] =
        emphasis_to_json(accent::analysis::emphasis_profile(spec_a,
                                                            load_words(args.words_a_path)));
  }
  if (!args.words_b_path.empty()) {
    j["emphasis_b"] =
        emphasis_to_json(accent::analysis::emphasis_profile(spec_b,
                                                            load_words(args.words_b_path)));
  }
  maybe_stamp(j, args.common.timestamps);
  write_json_file(out_json, j);

  if (!args.diff_pgm.empty()) {
    accent::Spectrogram diff;
    diff.rows = cmp.rows;
    diff.cols = cmp.cols;
    diff.values = cmp.difference;
    diff.time_step = seg_a.time_step;
    diff.freq_step = seg_a.freq_step;
    accent::export_spectrogram_pgm(diff, args.diff_pgm);
  }

  std::printf("terminal ratio a=%.6g b=%.6g -> %s\n", cmp.terminal_ratio_a,
              cmp.terminal_ratio_b, out_json.c_str());
  return 0;
}

int exit_code_for(const accent::Error& e) {
  if (dynamic_cast<const accent::InvalidConfig*>(&e) ||
      dynamic_cast<const accent::MissingColumn*>(&e) ||
      dynamic_cast<const accent::MalformedRow*>(&e) ||
      dynamic_cast<const accent::OutOfRange*>(&e))
    return 2;
  if (dynamic_cast<const accent::IoFailure*>(&e) ||
      dynamic_cast<const accent::MalformedHeader*>(&e) ||
      dynamic_cast<const accent::UnsupportedEncoding*>(&e) ||
      dynamic_cast<const accent::EmptyAudio*>(&e) ||
      dynamic_cast<const accent::EmptyManifest*>(&e) ||
      dynamic_cast<const accent::EmptyDataset*>(&e) ||
      dynamic_cast<const accent::EmptySegment*>(&e) ||
      dynamic_cast<const accent::SignalTooShort*>(&e) ||
      dynamic_cast<const accent::TotalDecodeFailure*>(&e))
    return 3;
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accent-recognition toolkit"};
  app.require_subcommand(1);

  PrepareArgs prepare_args;
  TrainArgs train_args;
  EvaluateArgs evaluate_args;
  SpectrogramArgs spectrogram_args;
  CompareArgs compare_args;

  auto add_common = [](CLI::App* cmd, CommonArgs& common) {
    cmd->add_option("--config", common.config_path, "JSON config file (flags win)");
    cmd->add_option("--seed", common.seed, "PRNG seed");
    cmd->add_option("--out", common.out_dir, "output directory");
    cmd->add_flag("--timestamps", common.timestamps,
                  "embed a timestamp in JSON outputs (off keeps outputs byte-stable)");
  };

  // prepare
  auto* prep = app.add_subcommand("prepare", "build feature caches from a manifest");
  add_common(prep, prepare_args.common);
  prep->add_option("--manifest", prepare_args.manifest_path, "CSV manifest path");
  prep->add_option("--audio-dir", prepare_args.audio_dir, "directory with audio files");
  prep->add_option("--classes", prepare_args.classes_csv, "comma-separated class list");
  prep->add_option("--filename-col", prepare_args.filename_col, "manifest filename column");
  prep->add_option("--language-col", prepare_args.language_col, "manifest language column");
  prep->add_option("--test-fraction", prepare_args.test_fraction, "held-out fraction");
  prep->add_option("--rows", prepare_args.rows, "feature grid rows");
  prep->add_option("--cols", prepare_args.cols, "feature grid cols");
  prep->add_option("--frame-len", prepare_args.frame_len, "STFT frame length");
  prep->add_option("--hop", prepare_args.hop, "STFT hop");
  prep->add_option("--window", prepare_args.window, "hann|rectangular");
  prep->add_option("--floor-db", prepare_args.floor_db, "spectrogram floor (dB)");
  prep->add_option("--synth-per-class", prepare_args.synth_per_class,
                   "generate a synthetic fixture with N items per class");
  prep->add_option("--synth-classes", prepare_args.synth_classes,
                   "synthetic fixture class count");
  prep->add_option("--noise-db", prepare_args.noise_db, "synthetic noise sigma (dB)");

  // train
  auto* train = app.add_subcommand("train", "train a model on a prepared cache");
  add_common(train, train_args.common);
  train->add_option("--cache", train_args.cache_dir, "prepared train cache")->required();
  train->add_option("--val-cache", train_args.val_cache_dir, "optional validation cache");
  train->add_option("--model", train_args.model, "cnn2|cnn4|svm");
  train->add_option("--lr", train_args.lr, "learning rate");
  train->add_option("--momentum", train_args.momentum, "SGD momentum");
  train->add_option("--epochs", train_args.epochs, "training epochs");
  train->add_option("--batch-size", train_args.batch_size, "minibatch size");
  train->add_option("--lambda", train_args.lambda, "SVM regularization");
  train->add_option("--dense-width", train_args.dense_width, "CNN dense layer width");
  train->add_option("--stop-train-loss", train_args.stop_train_loss,
                    "stop early when mean train loss drops below this (0 = off)");
  train->add_option("--stop-val-acc", train_args.stop_val_acc,
                    "stop early when val accuracy reaches this (0 = off)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "evaluate a checkpoint on a test cache");
  add_common(eval, evaluate_args.common);
  eval->add_option("--checkpoint", evaluate_args.checkpoint_path, "checkpoint file")
      ->required();
  eval->add_option("--cache", evaluate_args.cache_dir, "prepared test cache")->required();
  eval->add_option("--beta", evaluate_args.beta, "AGF beta");

  // spectrogram
  auto* spect = app.add_subcommand("spectrogram", "export a spectrogram image/grid");
  add_common(spect, spectrogram_args.common);
  spect->add_option("--in", spectrogram_args.in_path, "input WAV file")->required();
  spect->add_option("--out-pgm", spectrogram_args.out_pgm, "PGM output path");
  spect->add_option("--out-csv", spectrogram_args.out_csv, "CSV output path");
  spect->add_option("--frame-len", spectrogram_args.frame_len, "STFT frame length");
  spect->add_option("--hop", spectrogram_args.hop, "STFT hop");
  spect->add_option("--window", spectrogram_args.window, "hann|rectangular");
  spect->add_option("--floor-db", spectrogram_args.floor_db, "spectrogram floor (dB)");

  // compare
  auto* comp = app.add_subcommand("compare", "compare two speech segments");
  add_common(comp, compare_args.common);
  comp->add_option("--a", compare_args.a_path, "first WAV file")->required();
  comp->add_option("--b", compare_args.b_path, "second WAV file")->required();
  comp->add_option("--t0-a", compare_args.t0_a, "segment start in a (s)");
  comp->add_option("--t1-a", compare_args.t1_a, "segment end in a (s; 0 = whole file)");
  comp->add_option("--t0-b", compare_args.t0_b, "segment start in b (s)");
  comp->add_option("--t1-b", compare_args.t1_b, "segment end in b (s; 0 = whole file)");
  comp->add_option("--tail", compare_args.tail, "terminal-ratio tail fraction");
  comp->add_option("--bands", compare_args.bands, "frequency bands for stats");
  comp->add_option("--words", compare_args.words_a_path,
                   "JSON word windows for side a: [{t0,t1,label},...]");
  comp->add_option("--words-b", compare_args.words_b_path, "JSON word windows for side b");
  comp->add_option("--out-json", compare_args.out_json, "comparison JSON path");
  comp->add_option("--diff-pgm", compare_args.diff_pgm, "difference-grid PGM path");
  comp->add_option("--frame-len", compare_args.frame_len, "STFT frame length");
  comp->add_option("--hop", compare_args.hop, "STFT hop");
  comp->add_option("--window", compare_args.window, "hann|rectangular");
  comp->add_option("--floor-db", compare_args.floor_db, "spectrogram floor (dB)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (prep->parsed()) {
      const json cfg = load_config_file(prepare_args.common.config_path);
      merge_option(prep->get_option("--classes"), cfg, "classes", prepare_args.classes_csv);
      merge_option(prep->get_option("--test-fraction"), cfg, "test_fraction",
                   prepare_args.test_fraction);
      merge_option(prep->get_option("--rows"), cfg, "rows", prepare_args.rows);
      merge_option(prep->get_option("--cols"), cfg, "cols", prepare_args.cols);
      merge_option(prep->get_option("--frame-len"), cfg, "frame_len", prepare_args.frame_len);
      merge_option(prep->get_option("--hop"), cfg, "hop", prepare_args.hop);
      merge_option(prep->get_option("--window"), cfg, "window", prepare_args.window);
      merge_option(prep->get_option("--floor-db"), cfg, "floor_db", prepare_args.floor_db);
      merge_option(prep->get_option("--seed"), cfg, "seed", prepare_args.common.seed);
      return cmd_prepare(prepare_args);
    }
    if (train->parsed()) {
      const json cfg = load_config_file(train_args.common.config_path);
      merge_option(train->get_option("--model"), cfg, "model", train_args.model);
      merge_option(train->get_option("--lr"), cfg, "lr", train_args.lr);
      merge_option(train->get_option("--momentum"), cfg, "momentum", train_args.momentum);
      merge_option(train->get_option("--epochs"), cfg, "epochs", train_args.epochs);
      merge_option(train->get_option("--batch-size"), cfg, "batch_size",
                   train_args.batch_size);
      merge_option(train->get_option("--lambda"), cfg, "lambda", train_args.lambda);
      merge_option(train->get_option("--dense-width"), cfg, "dense_width",
                   train_args.dense_width);
      merge_option(train->get_option("--seed"), cfg, "seed", train_args.common.seed);
      if (train_args.model != "cnn2" && train_args.model != "cnn4" &&
          train_args.model != "svm")
        throw accent::InvalidConfig("train: --model must be cnn2, cnn4 or svm");
      return cmd_train(train_args);
    }
    if (eval->parsed()) {
      const json cfg = load_config_file(evaluate_args.common.config_path);
      merge_option(eval->get_option("--beta"), cfg, "beta", evaluate_args.beta);
      return cmd_evaluate(evaluate_args);
    }
    if (spect->parsed()) return cmd_spectrogram(spectrogram_args);
    if (comp->parsed()) return cmd_compare(compare_args);
  } catch (const accent::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
