#include "tasgnn/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "tasgnn/error.hpp"

namespace tasgnn {

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    fail(ErrorCategory::kValidation, "auc_roc: scores and labels differ in length");
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y == 1 ? 1 : 0;
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    fail(ErrorCategory::kValidation, "auc_roc needs both classes in the evaluation set");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of positive ranks with ties sharing the mid rank. Ranks are kept
  // doubled so every quantity stays an exact integer.
  std::size_t doubled_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const std::size_t doubled_mid = i + j + 1;  // 2 * ((i+1 + j) / 2)
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) doubled_rank_sum += doubled_mid;
    i = j;
  }
  const std::size_t doubled_u = doubled_rank_sum - n_pos * (n_pos + 1);
  return static_cast<double>(doubled_u) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> labels) {
  if (preds.size() != labels.size())
    fail(ErrorCategory::kValidation, "confusion: predictions and labels differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (labels[i] == 1) (preds[i] == 1 ? cm.tp : cm.fn)++;
    else (preds[i] == 1 ? cm.fp : cm.tn)++;
  }
  return cm;
}

std::array<ClassStats, 2> per_class_stats(const ConfusionMatrix& cm) {
  auto stats = [](double tp, double fp, double fn) {
    ClassStats s;
    s.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    s.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
  };
  return {stats(static_cast<double>(cm.tn), static_cast<double>(cm.fn), static_cast<double>(cm.fp)),
          stats(static_cast<double>(cm.tp), static_cast<double>(cm.fp), static_cast<double>(cm.fn))};
}

double macro_f1(std::span<const int> preds, std::span<const int> labels) {
  const auto s = per_class_stats(confusion(preds, labels));
  return 0.5 * (s[0].f1 + s[1].f1);
}

}  // namespace tasgnn
