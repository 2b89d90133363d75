#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "accent/dataset.hpp"
#include "accent/models.hpp"
#include "accent/rng.hpp"

using namespace accent;
using namespace accent::models;
namespace fs = std::filesystem;

namespace {

CnnConfig small_config(std::size_t num_classes = 3) {
  CnnConfig cfg;
  cfg.input_shape = {1, 16, 16};
  cfg.num_classes = num_classes;
  cfg.dense_width = 32;
  cfg.batch_size = 4;
  cfg.seed = 42;
  return cfg;
}

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "accent_model_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("build_cnn produces the documented parameter count") {
  CnnConfig cfg;  // defaults: cnn2, 1x128x128, 5 classes
  const CnnModel model = build_cnn(cfg);
  // 32*(1*9+1) + 64*(32*9+1) + 128*(64*32*32+1) + 5*(128+1)
  CHECK(count_parameters(model) == 8408197u);

  REQUIRE(model.convs.size() == 2);
  CHECK(model.convs[0].weights.shape == std::vector<std::size_t>{32, 1, 3, 3});
  CHECK(model.convs[1].weights.shape == std::vector<std::size_t>{64, 32, 3, 3});
  CHECK(model.fc1.weights.shape == std::vector<std::size_t>{128, 64 * 32 * 32});
  CHECK(model.fc2.weights.shape == std::vector<std::size_t>{5, 128});
}

TEST_CASE("cnn2 emits logits of length num_classes on the default shape") {
  CnnConfig cfg;
  const CnnModel model = build_cnn(cfg);
  const auto set = dataset::synth_dataset(5, 1, 0.0, 1);
  const auto probs = predict(model, set.items[0].spec);
  CHECK(probs.size() == 5);
  double sum = 0.0;
  for (double p : probs) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    sum += p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("same seed gives bit-identical initial weights") {
  const CnnModel a = build_cnn(small_config());
  const CnnModel b = build_cnn(small_config());
  for (std::size_t s = 0; s < a.convs.size(); ++s) {
    CHECK(a.convs[s].weights.data == b.convs[s].weights.data);
    CHECK(a.convs[s].bias.data == b.convs[s].bias.data);
  }
  CHECK(a.fc1.weights.data == b.fc1.weights.data);
  CHECK(a.fc2.weights.data == b.fc2.weights.data);
}

TEST_CASE("cnn4 builds with pooling after stages 2 and 4") {
  CnnConfig cfg = small_config();
  cfg.variant = "cnn4";
  const CnnModel model = build_cnn(cfg);
  REQUIRE(model.convs.size() == 4);
  // 16x16 input pooled twice -> 4x4 spatial at 64 channels
  CHECK(model.fc1.weights.shape[1] == 64u * 4 * 4);
  const auto set = dataset::synth_dataset(3, 1, 0.0, 1, 16, 16);
  CHECK(predict(model, set.items[0].spec).size() == 3);
}

TEST_CASE("train for zero epochs changes nothing") {
  CnnConfig cfg = small_config();
  cfg.epochs = 0;
  CnnModel model = build_cnn(cfg);
  const auto before = model.fc1.weights.data;
  const auto set = dataset::synth_dataset(3, 2, 1.0, 3, 16, 16);
  dataset::FeatureSet empty_val;
  const TrainHistory history = train(model, set, empty_val);
  CHECK(history.empty());
  CHECK(model.fc1.weights.data == before);
}

TEST_CASE("cnn memorizes a single sample") {
  CnnConfig cfg = small_config();
  cfg.epochs = 200;
  cfg.lr = 0.01;
  cfg.stop_at_train_loss = 0.05;  // p(true) > 0.9 once below this
  CnnModel model = build_cnn(cfg);

  auto set = dataset::synth_dataset(3, 1, 0.0, 5, 16, 16);
  set.items.resize(1);  // single-sample dataset
  dataset::FeatureSet empty_val;
  const TrainHistory history = train(model, set, empty_val);
  REQUIRE(!history.empty());
  CHECK(history.size() <= 200);
  CHECK(history.back().train_accuracy == 1.0);
  const auto probs = predict(model, set.items[0].spec);
  CHECK(probs[set.items[0].label] > 0.9);
}

TEST_CASE("training is deterministic given the seed") {
  const auto set = dataset::synth_dataset(3, 4, 2.0, 11, 16, 16);
  dataset::FeatureSet empty_val;

  CnnConfig cfg = small_config();
  cfg.epochs = 3;

  CnnModel m1 = build_cnn(cfg);
  const TrainHistory h1 = train(m1, set, empty_val);
  CnnModel m2 = build_cnn(cfg);
  const TrainHistory h2 = train(m2, set, empty_val);

  CHECK(m1.fc2.weights.data == m2.fc2.weights.data);
  CHECK(m1.convs[0].weights.data == m2.convs[0].weights.data);
  REQUIRE(h1.size() == h2.size());
  for (std::size_t i = 0; i < h1.size(); ++i) {
    CHECK(h1[i].train_loss == h2[i].train_loss);
    CHECK(h1[i].train_accuracy == h2[i].train_accuracy);
  }
}

TEST_CASE("cnn checkpoint round-trip reproduces predictions bit-identically") {
  const auto set = dataset::synth_dataset(3, 2, 2.0, 13, 16, 16);
  dataset::FeatureSet empty_val;
  CnnConfig cfg = small_config();
  cfg.epochs = 2;
  CnnModel model = build_cnn(cfg);
  train(model, set, empty_val);

  const auto path = temp_file("cnn.ckpt");
  save_checkpoint(model, path.string());
  const CnnModel loaded = load_cnn_checkpoint(path.string());
  CHECK(loaded.class_names == model.class_names);
  for (const auto& item : set.items) {
    const auto p1 = predict(model, item.spec);
    const auto p2 = predict(loaded, item.spec);
    CHECK(p1 == p2);
  }
}

TEST_CASE("svm separates the two-cluster fixture") {
  Rng rng(17);
  std::vector<std::vector<double>> features;
  std::vector<std::size_t> labels;
  for (int i = 0; i < 40; ++i) {
    const double cx = i % 2 == 0 ? 5.0 : -5.0;
    features.push_back({cx + rng.gaussian(), cx + rng.gaussian()});
    labels.push_back(i % 2 == 0 ? 0u : 1u);
  }
  SvmConfig cfg;
  cfg.seed = 21;
  const SvmModel model = train_svm_ovr(features, labels, cfg);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (svm_predict(model, features[i]).label == labels[i]) ++correct;
  CHECK(correct == features.size());

  // held-out points from the same clusters
  std::size_t held_correct = 0;
  for (int i = 0; i < 20; ++i) {
    const double cx = i % 2 == 0 ? 5.0 : -5.0;
    const std::vector<double> x = {cx + rng.gaussian(), cx + rng.gaussian()};
    if (svm_predict(model, x).label == (i % 2 == 0 ? 0u : 1u)) ++held_correct;
  }
  CHECK(held_correct == 20);
}

TEST_CASE("svm zero features give zero scores and the lowest class wins") {
  std::vector<std::vector<double>> features;
  std::vector<std::size_t> labels;
  for (int i = 0; i < 12; ++i) {
    features.push_back({0.0, 0.0, 0.0});
    labels.push_back(static_cast<std::size_t>(i % 3));
  }
  SvmConfig cfg;
  const SvmModel model = train_svm_ovr(features, labels, cfg);
  const auto pred = svm_predict(model, {0.0, 0.0, 0.0});
  for (double s : pred.scores) CHECK(s == 0.0);
  CHECK(pred.label == 0);  // argmax tie goes to the lowest index
}

TEST_CASE("svm hand-built weights and degenerate single class") {
  SvmModel model;
  model.class_names = {"c0", "c1"};
  model.weights = {{1.0, 0.0}, {0.0, 1.0}};
  const auto pred = svm_predict(model, {2.0, 1.0});
  CHECK(pred.label == 0);
  CHECK(pred.scores[0] == doctest::Approx(2.0));
  CHECK(pred.scores[1] == doctest::Approx(1.0));

  SvmModel single;
  single.class_names = {"only"};
  single.weights = {{0.3, -0.4}};
  CHECK(svm_predict(single, {1.0, 1.0}).label == 0);

  CHECK_THROWS_AS(svm_predict(model, {1.0, 2.0, 3.0}), DimensionMismatch);
}

TEST_CASE("svm scores scale homogeneously with the weights") {
  SvmModel model;
  model.class_names = {"a", "b", "c"};
  model.weights = {{1.0, -2.0}, {0.2, 0.9}, {-1.1, 0.4}};
  SvmModel scaled = model;
  for (auto& w : scaled.weights)
    for (auto& v : w) v *= 3.5;
  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const std::vector<double> x = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    CHECK(svm_predict(model, x).label == svm_predict(scaled, x).label);
  }
}

TEST_CASE("svm training is deterministic and round-trips through checkpoints") {
  const auto set = dataset::synth_dataset(3, 4, 3.0, 29, 32, 32);
  SvmConfig cfg;
  cfg.seed = 31;
  std::vector<std::vector<double>> features;
  std::vector<std::size_t> labels;
  for (const auto& item : set.items) {
    features.push_back(svm_features(item.spec, cfg));
    labels.push_back(item.label);
  }
  const SvmModel m1 = train_svm_ovr(features, labels, cfg, set.class_names);
  const SvmModel m2 = train_svm_ovr(features, labels, cfg, set.class_names);
  CHECK(m1.weights == m2.weights);

  const auto path = temp_file("svm.ckpt");
  save_checkpoint(m1, path.string());
  const SvmModel loaded = load_svm_checkpoint(path.string());
  CHECK(loaded.weights == m1.weights);
  CHECK(loaded.class_names == m1.class_names);
  for (const auto& f : features) {
    const auto p1 = svm_predict(m1, f);
    const auto p2 = svm_predict(loaded, f);
    CHECK(p1.label == p2.label);
    CHECK(p1.scores == p2.scores);
  }
}

TEST_CASE("checkpoint kind dispatch") {
  const auto set = dataset::synth_dataset(3, 1, 0.0, 37, 16, 16);
  CnnConfig cfg = small_config();
  cfg.epochs = 0;
  CnnModel model = build_cnn(cfg);
  model.class_names = set.class_names;
  const auto path = temp_file("kind.ckpt");
  save_checkpoint(model, path.string());
  CHECK(checkpoint_kind(path.string()) == "cnn2");
  CHECK_THROWS_AS(load_svm_checkpoint(path.string()), MalformedHeader);
}
