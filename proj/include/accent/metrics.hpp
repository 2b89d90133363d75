#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "accent/errors.hpp"

namespace accent::metrics {

// C x C counts, rows = true class, cols = predicted class.
struct ConfusionMatrix {
  std::vector<std::vector<long>> counts;
  std::vector<std::string> class_names;

  std::size_t num_classes() const { return counts.size(); }

  long total() const {
    long n = 0;
    for (const auto& row : counts)
      for (long v : row) n += v;
    return n;
  }

  long trace() const {
    long t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
  }
};

// One-vs-rest reduction of a single class.
struct BinaryCounts {
  long tp = 0, fp = 0, fn = 0, tn = 0;

  long total() const { return tp + fp + fn + tn; }
  double precision() const { return tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0; }
  double recall() const { return tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0; }
};

inline ConfusionMatrix confusion_matrix(const std::vector<std::size_t>& true_labels,
                                        const std::vector<std::size_t>& pred_labels,
                                        std::size_t num_classes,
                                        std::vector<std::string> class_names = {}) {
  if (true_labels.size() != pred_labels.size())
    throw LengthMismatch("confusion_matrix: label sequences differ in length");
  if (num_classes < 2)
    throw InvalidConfig("confusion_matrix: need at least 2 classes");
  ConfusionMatrix cm;
  cm.counts.assign(num_classes, std::vector<long>(num_classes, 0));
  if (class_names.empty()) {
    for (std::size_t c = 0; c < num_classes; ++c)
      class_names.push_back("class" + std::to_string(c));
  }
  cm.class_names = std::move(class_names);
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    if (true_labels[i] >= num_classes || pred_labels[i] >= num_classes)
      throw LabelOutOfRange("confusion_matrix: label out of range at index " +
                            std::to_string(i));
    ++cm.counts[true_labels[i]][pred_labels[i]];
  }
  return cm;
}

inline BinaryCounts binary_reduce(const ConfusionMatrix& cm, std::size_t c) {
  const std::size_t C = cm.num_classes();
  if (c >= C) throw LabelOutOfRange("binary_reduce: class index out of range");
  BinaryCounts bc;
  bc.tp = cm.counts[c][c];
  for (std::size_t t = 0; t < C; ++t) {
    for (std::size_t p = 0; p < C; ++p) {
      if (t == c && p == c) continue;
      if (p == c) bc.fp += cm.counts[t][p];
      else if (t == c) bc.fn += cm.counts[t][p];
      else bc.tn += cm.counts[t][p];
    }
  }
  return bc;
}

// trace / N.
inline double overall_accuracy(const ConfusionMatrix& cm) {
  const long n = cm.total();
  if (n < 1) throw EmptyMatrix("overall_accuracy: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(n);
}

inline double f1_of(const BinaryCounts& bc) {
  const double p = bc.precision(), r = bc.recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

// Unweighted mean of per-class F1; a class with precision+recall = 0
// contributes 0.
inline double f1_macro(const ConfusionMatrix& cm) {
  if (cm.total() < 1) throw EmptyMatrix("f1_macro: empty confusion matrix");
  double acc = 0.0;
  for (std::size_t c = 0; c < cm.num_classes(); ++c)
    acc += f1_of(binary_reduce(cm, c));
  return acc / static_cast<double>(cm.num_classes());
}

// F1 of pooled tp/fp/fn over all classes. Equals overall accuracy for
// single-label multi-class input.
inline double f1_micro(const ConfusionMatrix& cm) {
  if (cm.total() < 1) throw EmptyMatrix("f1_micro: empty confusion matrix");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    const BinaryCounts bc = binary_reduce(cm, c);
    tp += bc.tp;
    fp += bc.fp;
    fn += bc.fn;
  }
  const double p = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double r = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

// Mean bitwise XOR over all N*L label positions of boolean label sets.
inline double hamming_loss(const std::vector<std::vector<bool>>& truth,
                           const std::vector<std::vector<bool>>& predicted,
                           std::size_t num_labels) {
  if (truth.size() != predicted.size())
    throw LengthMismatch("hamming_loss: sample counts differ");
  if (truth.empty()) throw EmptyMatrix("hamming_loss: no samples");
  long flips = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].size() != num_labels || predicted[i].size() != num_labels)
      throw LengthMismatch("hamming_loss: sample " + std::to_string(i) +
                           " does not have " + std::to_string(num_labels) + " labels");
    for (std::size_t l = 0; l < num_labels; ++l)
      if (truth[i][l] != predicted[i][l]) ++flips;
  }
  return static_cast<double>(flips) /
         (static_cast<double>(truth.size()) * static_cast<double>(num_labels));
}

// Single-label convenience: one-hot encodes both sides. Each wrong sample
// flips exactly two bits, so this equals 2*(1 - accuracy)/C.
inline double hamming_loss_single_label(const std::vector<std::size_t>& true_labels,
                                        const std::vector<std::size_t>& pred_labels,
                                        std::size_t num_classes) {
  if (true_labels.size() != pred_labels.size())
    throw LengthMismatch("hamming_loss_single_label: lengths differ");
  if (true_labels.empty()) throw EmptyMatrix("hamming_loss_single_label: no samples");
  long flips = 0;
  for (std::size_t i = 0; i < true_labels.size(); ++i)
    if (true_labels[i] != pred_labels[i]) flips += 2;
  return static_cast<double>(flips) /
         (static_cast<double>(true_labels.size()) * static_cast<double>(num_classes));
}

// F-beta from one-vs-rest counts; 0 when precision + recall = 0.
inline double agf(const BinaryCounts& bc, double beta = 1.0) {
  if (beta <= 0.0) throw InvalidConfig("agf: beta must be > 0");
  const double p = bc.precision(), r = bc.recall();
  const double denom = beta * beta * p + r;
  return denom > 0.0 ? (1.0 + beta * beta) * p * r / denom : 0.0;
}

// (TPR + TNR) / 2. Requires both one-vs-rest sides to have support.
inline double auc_balanced(const BinaryCounts& bc) {
  if (bc.tp + bc.fn <= 0)
    throw UndefinedRate("auc_balanced: class has no positive support");
  if (bc.tn + bc.fp <= 0)
    throw UndefinedRate("auc_balanced: class has no negative support");
  const double tpr = static_cast<double>(bc.tp) / (bc.tp + bc.fn);
  const double tnr = static_cast<double>(bc.tn) / (bc.tn + bc.fp);
  return 0.5 * (tpr + tnr);
}

// Gini index of a balanced AUC: 2*AUC - 1.
inline double gini_auc(double auc) {
  if (auc < 0.0 || auc > 1.0) throw InvalidConfig("gini_auc: auc must be in [0,1]");
  return 2.0 * auc - 1.0;
}

// Gini impurity of a discrete distribution: 1 - sum(p^2). Kept separate
// from gini_auc; the two are different quantities.
inline double gini_impurity(const std::vector<double>& dist) {
  double sum = 0.0, sq = 0.0;
  for (double p : dist) {
    if (p < 0.0) throw NotADistribution("gini_impurity: negative component");
    sum += p;
    sq += p * p;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw NotADistribution("gini_impurity: components sum to " + std::to_string(sum));
  return 1.0 - sq;
}

struct ClassRow {
  std::string name;
  double acc = 0.0;
  double agf = 0.0;
  double auc = 0.0;
  double gi = 0.0;
};

struct ClassReport {
  std::vector<ClassRow> per_class;
  double overall_acc = 0.0;
  double f1_macro = 0.0;
  double f1_micro = 0.0;
  double hamming_loss = 0.0;
};

// Full report: per-class ACC/AGF/AUC/GI rows plus the overall block.
// Errors from constituent metrics (e.g. a class without support) propagate.
inline ClassReport evaluation_report(const ConfusionMatrix& cm, double beta = 1.0) {
  const long n = cm.total();
  if (n < 1) throw EmptyMatrix("evaluation_report: empty confusion matrix");
  ClassReport rep;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    const BinaryCounts bc = binary_reduce(cm, c);
    ClassRow row;
    row.name = cm.class_names[c];
    row.acc = static_cast<double>(bc.tp + bc.tn) / static_cast<double>(n);
    row.agf = agf(bc, beta);
    row.auc = auc_balanced(bc);
    row.gi = gini_auc(row.auc);
    rep.per_class.push_back(row);
  }
  rep.overall_acc = overall_accuracy(cm);
  rep.f1_macro = metrics::f1_macro(cm);
  rep.f1_micro = metrics::f1_micro(cm);
  // Single-label reading of the confusion matrix: every off-diagonal entry
  // flips two of the C one-hot bits.
  rep.hamming_loss = 2.0 * static_cast<double>(n - cm.trace()) /
                     (static_cast<double>(n) * static_cast<double>(cm.num_classes()));
  return rep;
}

// Aligned text table, column order Classes, ACC, AGF, AUC, GI, followed by
// the overall block.
inline std::string render_text(const ClassReport& rep) {
  std::size_t name_w = 7;  // "Classes"
  for (const auto& row : rep.per_class) name_w = std::max(name_w, row.name.size());

  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-*s  %8s  %8s  %8s  %9s\n",
                static_cast<int>(name_w), "Classes", "ACC", "AGF", "AUC", "GI");
  out += buf;
  for (const auto& row : rep.per_class) {
    std::snprintf(buf, sizeof(buf), "%-*s  %8.5f  %8.5f  %8.5f  %9.5f\n",
                  static_cast<int>(name_w), row.name.c_str(), row.acc, row.agf,
                  row.auc, row.gi);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "\nOverall ACC: %.5f\nF1 Macro:    %.5f\nF1 Micro:    %.5f\n"
                "Hamming Loss: %.5f\n",
                rep.overall_acc, rep.f1_macro, rep.f1_micro, rep.hamming_loss);
  out += buf;
  return out;
}

inline nlohmann::ordered_json report_to_json(const ClassReport& rep) {
  nlohmann::ordered_json j;
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& row : rep.per_class) {
    j["classes"].push_back({{"name", row.name},
                            {"acc", row.acc},
                            {"agf", row.agf},
                            {"auc", row.auc},
                            {"gi", row.gi}});
  }
  j["overall"] = {{"acc", rep.overall_acc},
                  {"f1_macro", rep.f1_macro},
                  {"f1_micro", rep.f1_micro},
                  {"hamming_loss", rep.hamming_loss}};
  return j;
}

}  // namespace accent::metrics
