#include "phenoid/metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "phenoid/common/error.h"

namespace phenoid::metrics {

namespace {

void CheckAligned(std::span<const int> y, std::span<const double> scores) {
  if (y.size() != scores.size()) {
    throw Error(ErrorCode::kShape, "labels and scores differ in length");
  }
  if (y.empty()) throw Error(ErrorCode::kShape, "empty label vector");
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorCode::kData, "NaN score");
  }
}

double Ratio(size_t num, size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionReport ConfusionMetrics(std::span<const int> y, std::span<const double> scores,
                                 double threshold) {
  CheckAligned(y, scores);
  ConfusionReport r;
  for (size_t i = 0; i < y.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    if (y[i]) {
      (pred ? r.tp : r.fn)++;
    } else {
      (pred ? r.fp : r.tn)++;
    }
  }
  r.precision_defined = r.tp + r.fp > 0;
  r.precision = Ratio(r.tp, r.tp + r.fp);
  r.recall = Ratio(r.tp, r.tp + r.fn);
  r.specificity = Ratio(r.tn, r.tn + r.fp);
  const double sum = r.precision + r.recall;
  r.f1 = sum == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / sum;
  return r;
}

double AucRoc(std::span<const int> y, std::span<const double> scores) {
  CheckAligned(y, scores);
  const size_t n = y.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  size_t n_pos = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (size_t k = i; k < j; ++k) {
      if (y[order[k]]) {
        rank_sum += mid_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::kUndefinedMetric, "AUC-ROC needs both classes");
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double AucPr(std::span<const int> y, std::span<const double> scores) {
  CheckAligned(y, scores);
  const size_t n = y.size();
  const size_t n_pos = static_cast<size_t>(std::count(y.begin(), y.end(), 1));
  if (n_pos == 0) throw Error(ErrorCode::kUndefinedMetric, "AUC-PR needs a positive");
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  double ap = 0.0;
  size_t tp = 0, fp = 0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    size_t block_tp = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      if (y[order[j]]) {
        ++block_tp;
      } else {
        ++fp;
      }
      ++j;
    }
    tp += block_tp;
    if (block_tp > 0) {
      const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
      ap += static_cast<double>(block_tp) / static_cast<double>(n_pos) * precision;
    }
    i = j;
  }
  return ap;
}

MetricsReport ScoreReport(std::span<const int> y, std::span<const double> scores,
                          double threshold) {
  MetricsReport r;
  r.confusion = ConfusionMetrics(y, scores, threshold);
  r.auc_roc = AucRoc(y, scores);
  r.auc_pr = AucPr(y, scores);
  return r;
}

MetricsReport DiscreteReport(std::span<const int> y, std::span<const int> predictions) {
  std::vector<double> scores(predictions.begin(), predictions.end());
  MetricsReport r;
  r.confusion = ConfusionMetrics(y, scores, 0.5);
  return r;
}

}  // namespace phenoid::metrics
