#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "accent/dataset.hpp"
#include "accent/dsp.hpp"
#include "accent/errors.hpp"
#include "accent/nn.hpp"
#include "accent/rng.hpp"
#include "accent/tensor.hpp"

namespace accent::models {

struct CnnConfig {
  std::string variant = "cnn2";  // cnn2 | cnn4
  std::array<std::size_t, 3> input_shape = {1, 128, 128};
  std::vector<std::size_t> conv_filters;  // filled from variant when empty
  std::size_t kernel = 3;
  std::size_t dense_width = 128;
  std::size_t num_classes = 5;
  double lr = 0.01;
  double momentum = 0.9;
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  std::uint64_t seed = 42;
  // dB value mapped to 0.0 at the model input; the feature floor.
  double input_floor_db = -80.0;
  // Optional early stops; 0 disables. Training still never exceeds
  // `epochs` epochs.
  double stop_at_train_loss = 0.0;
  double stop_at_val_accuracy = 0.0;

  std::vector<std::size_t> filters() const {
    if (!conv_filters.empty()) return conv_filters;
    if (variant == "cnn2") return {32, 64};
    if (variant == "cnn4") return {32, 32, 64, 64};
    throw InvalidConfig("CnnConfig: unknown variant '" + variant + "'");
  }

  // Indices of conv stages followed by 2x2 max pooling. Two pooling stages
  // either way, so the flattened width matches between variants.
  std::vector<std::size_t> pooled_stages() const {
    if (variant == "cnn2") return {0, 1};
    if (variant == "cnn4") return {1, 3};
    throw InvalidConfig("CnnConfig: unknown variant '" + variant + "'");
  }

  void validate() const {
    const auto f = filters();
    if (variant == "cnn2" && f.size() != 2)
      throw InvalidConfig("CnnConfig: cnn2 needs exactly 2 conv stages");
    if (variant == "cnn4" && f.size() != 4)
      throw InvalidConfig("CnnConfig: cnn4 needs exactly 4 conv stages");
    if (num_classes < 2) throw InvalidConfig("CnnConfig: num_classes must be >= 2");
    if (kernel % 2 == 0) throw InvalidConfig("CnnConfig: kernel must be odd");
    if (input_shape[0] != 1)
      throw InvalidConfig("CnnConfig: single input channel expected");
    const std::size_t pools = pooled_stages().size();
    const std::size_t div = std::size_t(1) << pools;
    if (input_shape[1] % div != 0 || input_shape[2] % div != 0)
      throw InvalidConfig("CnnConfig: input dims must be divisible by " +
                          std::to_string(div));
    if (momentum < 0.0 || momentum >= 1.0)
      throw InvalidConfig("CnnConfig: momentum must be in [0, 1)");
    if (lr <= 0.0) throw InvalidConfig("CnnConfig: lr must be > 0");
    if (batch_size == 0) throw InvalidConfig("CnnConfig: batch_size must be >= 1");
    if (input_floor_db >= 0.0)
      throw InvalidConfig("CnnConfig: input_floor_db must be negative");
  }
};

struct SvmConfig {
  double lambda = 1e-4;
  std::size_t epochs = 30;
  std::uint64_t seed = 42;
  std::size_t feature_rows = 32;
  std::size_t feature_cols = 32;
  double input_floor_db = -80.0;

  std::size_t feature_dim() const { return feature_rows * feature_cols; }

  void validate() const {
    if (lambda <= 0.0) throw InvalidConfig("SvmConfig: lambda must be > 0");
    if (epochs < 1) throw InvalidConfig("SvmConfig: epochs must be >= 1");
    if (feature_rows == 0 || feature_cols == 0)
      throw InvalidConfig("SvmConfig: feature dims must be >= 1");
  }
};

struct EpochRecord {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> val_accuracy;
};

using TrainHistory = std::vector<EpochRecord>;

// ---------------------------------------------------------------------------
// CNN

struct CnnModel {
  CnnConfig config;
  std::vector<std::string> class_names;
  std::vector<nn::LayerParams<float>> convs;
  nn::LayerParams<float> fc1;
  nn::LayerParams<float> fc2;
  Rng rng{0};  // init + shuffle stream; advanced by build and train
};

// Stack: [conv(3x3, pad 1) -> ReLU (-> maxpool2 per pooled_stages)]* ->
// flatten -> dense(dense_width) -> ReLU -> dense(num_classes).
// Weight draws happen in a fixed order from the seeded PRNG so equal seeds
// give bit-identical parameters.
inline CnnModel build_cnn(const CnnConfig& config) {
  config.validate();
  CnnModel model;
  model.config = config;
  model.rng = Rng(config.seed);

  const auto filters = config.filters();
  const std::size_t k = config.kernel;
  std::size_t in_c = config.input_shape[0];
  std::size_t h = config.input_shape[1], w = config.input_shape[2];
  const auto pooled = config.pooled_stages();

  for (std::size_t s = 0; s < filters.size(); ++s) {
    model.convs.push_back(nn::make_conv2d<float>(filters[s], in_c, k, k, model.rng));
    in_c = filters[s];
    if (std::find(pooled.begin(), pooled.end(), s) != pooled.end()) {
      h /= 2;
      w /= 2;
    }
  }
  model.fc1 = nn::make_dense<float>(config.dense_width, in_c * h * w, model.rng);
  model.fc2 = nn::make_dense<float>(config.num_classes, config.dense_width, model.rng);
  return model;
}

inline std::size_t count_parameters(const CnnModel& model) {
  std::size_t n = 0;
  for (const auto& c : model.convs) n += c.weights.numel() + c.bias.numel();
  n += model.fc1.weights.numel() + model.fc1.bias.numel();
  n += model.fc2.weights.numel() + model.fc2.bias.numel();
  return n;
}

// Maps a dB spectrogram onto the network input range: floor -> 0, 0 dB -> 1.
inline Tensor<float> to_input_tensor(const Spectrogram& spec, const CnnConfig& config) {
  if (spec.rows != config.input_shape[1] || spec.cols != config.input_shape[2])
    throw ShapeMismatch("to_input_tensor: spectrogram " + std::to_string(spec.rows) +
                        "x" + std::to_string(spec.cols) + " does not match input " +
                        std::to_string(config.input_shape[1]) + "x" +
                        std::to_string(config.input_shape[2]));
  Tensor<float> x({1, spec.rows, spec.cols});
  const double floor = config.input_floor_db;
  const double scale = -1.0 / floor;
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    x.data[i] = static_cast<float>((spec.values[i] - floor) * scale);
  return x;
}

namespace detail {

struct CnnForwardCache {
  std::vector<Tensor<float>> conv_in;   // input of each conv stage
  std::vector<Tensor<float>> conv_out;  // pre-activation
  std::vector<int> pool_of_stage;       // index into pools, -1 if none
  std::vector<nn::Maxpool2Result<float>> pools;
  std::vector<Tensor<float>> relu_out;  // post-activation (pool input)
  Tensor<float> flat;
  Tensor<float> fc1_out;
  Tensor<float> fc1_relu;
};

inline Tensor<float> cnn_forward(const CnnModel& model, const Tensor<float>& input,
                                 CnnForwardCache* cache) {
  const auto pooled = model.config.pooled_stages();
  const std::size_t pad = model.config.kernel / 2;
  Tensor<float> x = input;
  if (cache) {
    cache->conv_in.clear();
    cache->conv_out.clear();
    cache->pools.clear();
    cache->relu_out.clear();
    cache->pool_of_stage.assign(model.convs.size(), -1);
  }
  for (std::size_t s = 0; s < model.convs.size(); ++s) {
    if (cache) cache->conv_in.push_back(x);
    Tensor<float> pre = nn::conv2d_forward(x, model.convs[s], 1, pad);
    Tensor<float> act = nn::relu(pre);
    if (cache) cache->conv_out.push_back(std::move(pre));
    const bool pool_here = std::find(pooled.begin(), pooled.end(), s) != pooled.end();
    if (pool_here) {
      auto res = nn::maxpool2(act);
      if (cache) {
        cache->relu_out.push_back(std::move(act));
        cache->pool_of_stage[s] = static_cast<int>(cache->pools.size());
        cache->pools.push_back(res);
      }
      x = std::move(res.output);
    } else {
      if (cache) cache->relu_out.push_back(act);
      x = std::move(act);
    }
  }
  Tensor<float> flat({x.numel()});
  flat.data = x.data;
  if (cache) cache->flat = flat;
  Tensor<float> fc1_out = nn::dense_forward(flat, model.fc1);
  Tensor<float> fc1_relu = nn::relu(fc1_out);
  Tensor<float> logits = nn::dense_forward(fc1_relu, model.fc2);
  if (cache) {
    cache->fc1_out = std::move(fc1_out);
    cache->fc1_relu = std::move(fc1_relu);
  }
  return logits;
}

// Accumulates parameter gradients into each layer's grad buffers and
// returns nothing; grad_logits is consumed as the upstream gradient.
inline void cnn_backward(CnnModel& model, const CnnForwardCache& cache,
                         const Tensor<float>& grad_logits) {
  const std::size_t pad = model.config.kernel / 2;

  auto accumulate = [](Tensor<float>& param, const Tensor<float>& g) {
    param.alloc_grad();
    for (std::size_t i = 0; i < g.data.size(); ++i) param.grad[i] += g.data[i];
  };

  nn::DenseGrads<float> g2 = nn::dense_backward(grad_logits, cache.fc1_relu, model.fc2);
  accumulate(model.fc2.weights, g2.weights);
  accumulate(model.fc2.bias, g2.bias);

  Tensor<float> d_fc1 = nn::relu_backward(g2.input, cache.fc1_out);
  nn::DenseGrads<float> g1 = nn::dense_backward(d_fc1, cache.flat, model.fc1);
  accumulate(model.fc1.weights, g1.weights);
  accumulate(model.fc1.bias, g1.bias);

  // reshape flat gradient back to the last stage's output shape
  const Tensor<float>* last_out;
  const std::size_t last = model.convs.size() - 1;
  if (cache.pool_of_stage[last] >= 0)
    last_out = &cache.pools[static_cast<std::size_t>(cache.pool_of_stage[last])].output;
  else
    last_out = &cache.relu_out[last];
  Tensor<float> dx(last_out->shape);
  dx.data = g1.input.data;

  for (std::size_t s = model.convs.size(); s-- > 0;) {
    if (cache.pool_of_stage[s] >= 0) {
      const auto& pool = cache.pools[static_cast<std::size_t>(cache.pool_of_stage[s])];
      dx = nn::maxpool2_backward(dx, pool.argmax, cache.relu_out[s].shape);
    }
    dx = nn::relu_backward(dx, cache.conv_out[s]);
    nn::Conv2dGrads<float> g =
        nn::conv2d_backward(dx, cache.conv_in[s], model.convs[s], 1, pad);
    accumulate(model.convs[s].weights, g.weights);
    accumulate(model.convs[s].bias, g.bias);
    dx = std::move(g.input);
  }
}

inline std::vector<nn::LayerParams<float>*> all_params(CnnModel& model) {
  std::vector<nn::LayerParams<float>*> ps;
  for (auto& c : model.convs) ps.push_back(&c);
  ps.push_back(&model.fc1);
  ps.push_back(&model.fc2);
  return ps;
}

}  // namespace detail

// Softmax probabilities for one spectrogram.
inline std::vector<double> predict(const CnnModel& model, const Spectrogram& spec) {
  Tensor<float> x = to_input_tensor(spec, model.config);
  Tensor<float> logits = detail::cnn_forward(model, x, nullptr);
  Tensor<double> dlogits({logits.numel()});
  for (std::size_t i = 0; i < logits.data.size(); ++i)
    dlogits.data[i] = static_cast<double>(logits.data[i]);
  auto res = nn::softmax_cross_entropy(dlogits, 0);  // label unused for probs
  return res.probs;
}

inline std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// Minibatch SGD with momentum over the feature set. Shuffling draws from
// the model's seeded PRNG stream, so (seed, data, config) fully determine
// the outcome. Returns one history record per completed epoch.
inline TrainHistory train(CnnModel& model, const dataset::FeatureSet& train_set,
                          const dataset::FeatureSet& val_set) {
  const CnnConfig& cfg = model.config;
  if (cfg.epochs > 0 && train_set.items.empty())
    throw EmptyDataset("train: empty training set");
  model.class_names = train_set.class_names;
  for (const auto& item : train_set.items) {
    if (item.label >= cfg.num_classes)
      throw LabelOutOfRange("train: label " + std::to_string(item.label) +
                            " out of range");
  }

  TrainHistory history;
  std::vector<std::size_t> order(train_set.items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  detail::CnnForwardCache cache;
  auto params = detail::all_params(model);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    model.rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const float inv_batch = 1.0f / static_cast<float>(end - start);
      for (std::size_t i = start; i < end; ++i) {
        const auto& item = train_set.items[order[i]];
        Tensor<float> x = to_input_tensor(item.spec, cfg);
        Tensor<float> logits = detail::cnn_forward(model, x, &cache);
        auto ce = nn::softmax_cross_entropy(logits, item.label);
        loss_sum += static_cast<double>(ce.loss);
        std::size_t pred = 0;
        for (std::size_t c = 1; c < ce.probs.size(); ++c)
          if (ce.probs[c] > ce.probs[pred]) pred = c;
        if (pred == item.label) ++correct;
        for (auto& g : ce.grad_logits.data) g *= inv_batch;
        detail::cnn_backward(model, cache, ce.grad_logits);
      }
      nn::sgd_step(params, cfg.lr, cfg.momentum);
    }

    EpochRecord rec;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    if (!val_set.items.empty()) {
      std::size_t val_correct = 0;
      for (const auto& item : val_set.items)
        if (argmax(predict(model, item.spec)) == item.label) ++val_correct;
      rec.val_accuracy =
          static_cast<double>(val_correct) / static_cast<double>(val_set.items.size());
    }
    history.push_back(rec);

    if (cfg.stop_at_train_loss > 0.0 && rec.train_loss < cfg.stop_at_train_loss) break;
    if (cfg.stop_at_val_accuracy > 0.0 && rec.val_accuracy &&
        *rec.val_accuracy >= cfg.stop_at_val_accuracy)
      break;
  }
  return history;
}

// ---------------------------------------------------------------------------
// Linear SVM baseline (one-vs-rest, Pegasos subgradient schedule)

struct SvmModel {
  SvmConfig config;
  std::vector<std::string> class_names;
  // One weight vector per class. Scores are pure linear (no bias term), so
  // an all-zero feature vector scores zero for every class.
  std::vector<std::vector<double>> weights;

  std::size_t num_classes() const { return weights.size(); }
};

// Flattened block-mean downsampled spectrogram, scaled like the CNN input.
inline std::vector<double> svm_features(const Spectrogram& spec, const SvmConfig& cfg) {
  const Spectrogram small = downsample_mean(spec, cfg.feature_rows, cfg.feature_cols);
  std::vector<double> x(small.values.size());
  const double floor = cfg.input_floor_db;
  const double scale = -1.0 / floor;
  for (std::size_t i = 0; i < small.values.size(); ++i)
    x[i] = (small.values[i] - floor) * scale;
  return x;
}

// Pegasos: at step t the learning rate is 1/(lambda*t); each step picks one
// sample uniformly and updates every one-vs-rest classifier on it.
inline SvmModel train_svm_ovr(const std::vector<std::vector<double>>& features,
                              const std::vector<std::size_t>& labels,
                              const SvmConfig& config,
                              std::vector<std::string> class_names = {}) {
  config.validate();
  if (features.empty()) throw EmptyDataset("train_svm_ovr: no samples");
  if (features.size() != labels.size())
    throw DimensionMismatch("train_svm_ovr: feature/label count mismatch");
  const std::size_t dim = features[0].size();
  for (const auto& f : features)
    if (f.size() != dim)
      throw DimensionMismatch("train_svm_ovr: inconsistent feature dimensions");

  std::size_t num_classes = 0;
  for (std::size_t l : labels) num_classes = std::max(num_classes, l + 1);
  if (num_classes < 2)
    throw EmptyDataset("train_svm_ovr: need at least 2 classes present");

  SvmModel model;
  model.config = config;
  if (class_names.empty())
    for (std::size_t c = 0; c < num_classes; ++c)
      class_names.push_back("class" + std::to_string(c));
  model.class_names = std::move(class_names);
  model.weights.assign(num_classes, std::vector<double>(dim, 0.0));

  Rng rng(config.seed);
  const std::size_t total_steps = config.epochs * features.size();
  for (std::size_t t = 1; t <= total_steps; ++t) {
    const std::size_t i = static_cast<std::size_t>(rng.below(features.size()));
    const auto& x = features[i];
    const double eta = 1.0 / (config.lambda * static_cast<double>(t));
    const double shrink = 1.0 - 1.0 / static_cast<double>(t);  // 1 - eta*lambda
    for (std::size_t c = 0; c < num_classes; ++c) {
      auto& w = model.weights[c];
      const double y = labels[i] == c ? 1.0 : -1.0;
      double score = 0.0;
      for (std::size_t d = 0; d < dim; ++d) score += w[d] * x[d];
      const bool violates = y * score < 1.0;
      for (std::size_t d = 0; d < dim; ++d) {
        w[d] *= shrink;
        if (violates) w[d] += eta * y * x[d];
      }
    }
  }
  return model;
}

struct SvmPrediction {
  std::size_t label = 0;
  std::vector<double> scores;
};

// Argmax over per-class linear scores; ties break toward the lowest index.
inline SvmPrediction svm_predict(const SvmModel& model, const std::vector<double>& x) {
  if (model.weights.empty()) throw EmptyDataset("svm_predict: untrained model");
  const std::size_t dim = model.weights[0].size();
  if (x.size() != dim)
    throw DimensionMismatch("svm_predict: feature length " + std::to_string(x.size()) +
                            " != " + std::to_string(dim));
  SvmPrediction pred;
  pred.scores.resize(model.num_classes());
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    const auto& w = model.weights[c];
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += w[d] * x[d];
    pred.scores[c] = s;
  }
  pred.label = 0;
  for (std::size_t c = 1; c < pred.scores.size(); ++c)
    if (pred.scores[c] > pred.scores[pred.label]) pred.label = c;
  return pred;
}

// ---------------------------------------------------------------------------
// Checkpoints: versioned binary container. Layout:
//   "ACKP" | u32 version | u64 json_len | json header |
//   u32 tensor_count | per tensor: u32 name_len, name, u8 dtype (4|8),
//   u32 ndim, u64 dims..., raw little-endian data
// The json header carries the kind ("cnn2", "cnn4" or "svm"), the training
// config and the class names.

namespace detail {

inline void write_tensor_f32(std::ofstream& f, const std::string& name,
                             const std::vector<std::size_t>& shape,
                             const std::vector<float>& data) {
  const std::uint32_t name_len = static_cast<std::uint32_t>(name.size());
  f.write(reinterpret_cast<const char*>(&name_len), 4);
  f.write(name.data(), name_len);
  const std::uint8_t dtype = 4;
  f.write(reinterpret_cast<const char*>(&dtype), 1);
  const std::uint32_t ndim = static_cast<std::uint32_t>(shape.size());
  f.write(reinterpret_cast<const char*>(&ndim), 4);
  for (std::size_t d : shape) {
    const std::uint64_t v = d;
    f.write(reinterpret_cast<const char*>(&v), 8);
  }
  f.write(reinterpret_cast<const char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(float)));
}

inline void write_tensor_f64(std::ofstream& f, const std::string& name,
                             const std::vector<std::size_t>& shape,
                             const std::vector<double>& data) {
  const std::uint32_t name_len = static_cast<std::uint32_t>(name.size());
  f.write(reinterpret_cast<const char*>(&name_len), 4);
  f.write(name.data(), name_len);
  const std::uint8_t dtype = 8;
  f.write(reinterpret_cast<const char*>(&dtype), 1);
  const std::uint32_t ndim = static_cast<std::uint32_t>(shape.size());
  f.write(reinterpret_cast<const char*>(&ndim), 4);
  for (std::size_t d : shape) {
    const std::uint64_t v = d;
    f.write(reinterpret_cast<const char*>(&v), 8);
  }
  f.write(reinterpret_cast<const char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
}

struct RawTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> f32;
  std::vector<double> f64;
  int dtype = 4;
};

struct RawCheckpoint {
  nlohmann::json header;
  std::vector<RawTensor> tensors;

  const RawTensor& find(const std::string& name) const {
    for (const auto& t : tensors)
      if (t.name == name) return t;
    throw MalformedHeader("checkpoint: missing tensor '" + name + "'");
  }
};

inline RawCheckpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("read_checkpoint: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::string(magic, 4) != "ACKP")
    throw MalformedHeader("read_checkpoint: bad magic in " + path);
  std::uint32_t version = 0;
  f.read(reinterpret_cast<char*>(&version), 4);
  if (version != 1)
    throw MalformedHeader("read_checkpoint: unsupported version " +
                          std::to_string(version));
  std::uint64_t json_len = 0;
  f.read(reinterpret_cast<char*>(&json_len), 8);
  std::string header(json_len, '\0');
  f.read(header.data(), static_cast<std::streamsize>(json_len));

  RawCheckpoint ckpt;
  ckpt.header = nlohmann::json::parse(header);
  std::uint32_t count = 0;
  f.read(reinterpret_cast<char*>(&count), 4);
  for (std::uint32_t i = 0; i < count; ++i) {
    RawTensor t;
    std::uint32_t name_len = 0;
    f.read(reinterpret_cast<char*>(&name_len), 4);
    t.name.resize(name_len);
    f.read(t.name.data(), name_len);
    std::uint8_t dtype = 0;
    f.read(reinterpret_cast<char*>(&dtype), 1);
    t.dtype = dtype;
    std::uint32_t ndim = 0;
    f.read(reinterpret_cast<char*>(&ndim), 4);
    std::size_t numel = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      std::uint64_t v = 0;
      f.read(reinterpret_cast<char*>(&v), 8);
      t.shape.push_back(v);
      numel *= v;
    }
    if (dtype == 4) {
      t.f32.resize(numel);
      f.read(reinterpret_cast<char*>(t.f32.data()),
             static_cast<std::streamsize>(numel * sizeof(float)));
    } else if (dtype == 8) {
      t.f64.resize(numel);
      f.read(reinterpret_cast<char*>(t.f64.data()),
             static_cast<std::streamsize>(numel * sizeof(double)));
    } else {
      throw MalformedHeader("read_checkpoint: unknown dtype");
    }
    if (!f) throw MalformedHeader("read_checkpoint: truncated tensor data");
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

inline nlohmann::ordered_json cnn_config_to_json(const CnnConfig& c) {
  return {{"variant", c.variant},
          {"input_shape", c.input_shape},
          {"conv_filters", c.filters()},
          {"kernel", c.kernel},
          {"dense_width", c.dense_width},
          {"num_classes", c.num_classes},
          {"lr", c.lr},
          {"momentum", c.momentum},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"input_floor_db", c.input_floor_db}};
}

inline CnnConfig cnn_config_from_json(const nlohmann::json& j) {
  CnnConfig c;
  c.variant = j.at("variant").get<std::string>();
  const auto shape = j.at("input_shape").get<std::vector<std::size_t>>();
  if (shape.size() != 3) throw MalformedHeader("checkpoint: bad input_shape");
  c.input_shape = {shape[0], shape[1], shape[2]};
  c.conv_filters = j.at("conv_filters").get<std::vector<std::size_t>>();
  c.kernel = j.at("kernel").get<std::size_t>();
  c.dense_width = j.at("dense_width").get<std::size_t>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.lr = j.at("lr").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.input_floor_db = j.at("input_floor_db").get<double>();
  return c;
}

}  // namespace detail

inline void save_checkpoint(const CnnModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoFailure("save_checkpoint: cannot open " + path);
  nlohmann::ordered_json header;
  header["kind"] = model.config.variant;
  header["config"] = detail::cnn_config_to_json(model.config);
  header["class_names"] = model.class_names;
  const std::string hs = header.dump();

  f.write("ACKP", 4);
  const std::uint32_t version = 1;
  f.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint64_t json_len = hs.size();
  f.write(reinterpret_cast<const char*>(&json_len), 8);
  f.write(hs.data(), static_cast<std::streamsize>(hs.size()));

  const std::uint32_t count = static_cast<std::uint32_t>(model.convs.size() * 2 + 4);
  f.write(reinterpret_cast<const char*>(&count), 4);
  for (std::size_t s = 0; s < model.convs.size(); ++s) {
    const std::string base = "conv" + std::to_string(s);
    detail::write_tensor_f32(f, base + ".weights", model.convs[s].weights.shape,
                             model.convs[s].weights.data);
    detail::write_tensor_f32(f, base + ".bias", model.convs[s].bias.shape,
                             model.convs[s].bias.data);
  }
  detail::write_tensor_f32(f, "fc1.weights", model.fc1.weights.shape, model.fc1.weights.data);
  detail::write_tensor_f32(f, "fc1.bias", model.fc1.bias.shape, model.fc1.bias.data);
  detail::write_tensor_f32(f, "fc2.weights", model.fc2.weights.shape, model.fc2.weights.data);
  detail::write_tensor_f32(f, "fc2.bias", model.fc2.bias.shape, model.fc2.bias.data);
  if (!f) throw IoFailure("save_checkpoint: write failed: " + path);
}

inline void save_checkpoint(const SvmModel& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoFailure("save_checkpoint: cannot open " + path);
  nlohmann::ordered_json header;
  header["kind"] = "svm";
  header["config"] = {{"lambda", model.config.lambda},
                      {"epochs", model.config.epochs},
                      {"seed", model.config.seed},
                      {"feature_rows", model.config.feature_rows},
                      {"feature_cols", model.config.feature_cols},
                      {"input_floor_db", model.config.input_floor_db}};
  header["class_names"] = model.class_names;
  const std::string hs = header.dump();

  f.write("ACKP", 4);
  const std::uint32_t version = 1;
  f.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint64_t json_len = hs.size();
  f.write(reinterpret_cast<const char*>(&json_len), 8);
  f.write(hs.data(), static_cast<std::streamsize>(hs.size()));

  const std::uint32_t count = static_cast<std::uint32_t>(model.weights.size());
  f.write(reinterpret_cast<const char*>(&count), 4);
  for (std::size_t c = 0; c < model.weights.size(); ++c) {
    detail::write_tensor_f64(f, "class" + std::to_string(c) + ".weights",
                             {model.weights[c].size()}, model.weights[c]);
  }
  if (!f) throw IoFailure("save_checkpoint: write failed: " + path);
}

inline std::string checkpoint_kind(const std::string& path) {
  return detail::read_checkpoint(path).header.at("kind").get<std::string>();
}

inline CnnModel load_cnn_checkpoint(const std::string& path) {
  const auto ckpt = detail::read_checkpoint(path);
  const std::string kind = ckpt.header.at("kind").get<std::string>();
  if (kind != "cnn2" && kind != "cnn4")
    throw MalformedHeader("load_cnn_checkpoint: not a CNN checkpoint (" + kind + ")");
  CnnModel model = build_cnn(detail::cnn_config_from_json(ckpt.header.at("config")));
  model.class_names = ckpt.header.at("class_names").get<std::vector<std::string>>();
  auto load_into = [&](const std::string& name, Tensor<float>& t) {
    const auto& raw = ckpt.find(name);
    if (raw.shape != t.shape || raw.dtype != 4)
      throw ShapeMismatch("load_cnn_checkpoint: tensor '" + name + "' shape mismatch");
    t.data = raw.f32;
  };
  for (std::size_t s = 0; s < model.convs.size(); ++s) {
    const std::string base = "conv" + std::to_string(s);
    load_into(base + ".weights", model.convs[s].weights);
    load_into(base + ".bias", model.convs[s].bias);
  }
  load_into("fc1.weights", model.fc1.weights);
  load_into("fc1.bias", model.fc1.bias);
  load_into("fc2.weights", model.fc2.weights);
  load_into("fc2.bias", model.fc2.bias);
  return model;
}

inline SvmModel load_svm_checkpoint(const std::string& path) {
  const auto ckpt = detail::read_checkpoint(path);
  if (ckpt.header.at("kind").get<std::string>() != "svm")
    throw MalformedHeader("load_svm_checkpoint: not an SVM checkpoint");
  SvmModel model;
  const auto& cfg = ckpt.header.at("config");
  model.config.lambda = cfg.at("lambda").get<double>();
  model.config.epochs = cfg.at("epochs").get<std::size_t>();
  model.config.seed = cfg.at("seed").get<std::uint64_t>();
  model.config.feature_rows = cfg.at("feature_rows").get<std::size_t>();
  model.config.feature_cols = cfg.at("feature_cols").get<std::size_t>();
  model.config.input_floor_db = cfg.at("input_floor_db").get<double>();
  model.class_names = ckpt.header.at("class_names").get<std::vector<std::string>>();
  for (const auto& t : ckpt.tensors) {
    if (t.dtype != 8)
      throw MalformedHeader("load_svm_checkpoint: expected f64 tensors");
    model.weights.push_back(t.f64);
  }
  if (model.weights.empty())
    throw MalformedHeader("load_svm_checkpoint: no weight tensors");
  return model;
}

}  // namespace accent::models
