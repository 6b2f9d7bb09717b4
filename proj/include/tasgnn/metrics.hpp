#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace tasgnn {

// Mann-Whitney AUC: (concordant + 0.5 * tied) / (n_pos * n_neg), computed
// from average ranks in O(n log n). Labels are 0/1; both must be present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

struct ConfusionMatrix {
  std::size_t tn = 0, fp = 0, fn = 0, tp = 0;
  std::size_t total() const noexcept { return tn + fp + fn + tp; }
};

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> labels);

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Index 0 = benign, 1 = fraud. Zero denominators count as 0.
std::array<ClassStats, 2> per_class_stats(const ConfusionMatrix& cm);

double macro_f1(std::span<const int> preds, std::span<const int> labels);

}  // namespace tasgnn
