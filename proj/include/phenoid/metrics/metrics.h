#ifndef PHENOID_METRICS_METRICS_H_
#define PHENOID_METRICS_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>

namespace phenoid::metrics {

struct ConfusionReport {
  size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double specificity = 0.0;
  // False when no row was predicted positive; precision is then reported as 0.
  bool precision_defined = true;
};

// A row counts as predicted positive iff score >= threshold.
ConfusionReport ConfusionMetrics(std::span<const int> y, std::span<const double> scores,
                                 double threshold = 0.5);

// Mann-Whitney AUC with half credit for ties. Single class -> kUndefinedMetric.
double AucRoc(std::span<const int> y, std::span<const double> scores);

// Average precision over descending-score cut points, tied scores forming one
// block. No positives -> kUndefinedMetric.
double AucPr(std::span<const int> y, std::span<const double> scores);

struct MetricsReport {
  ConfusionReport confusion;
  std::optional<double> auc_roc;  // empty: not applicable (discrete predictor)
  std::optional<double> auc_pr;
};

MetricsReport ScoreReport(std::span<const int> y, std::span<const double> scores,
                          double threshold = 0.5);
// Hard 0/1 predictions, such as ICD rule verdicts; AUC fields stay empty.
MetricsReport DiscreteReport(std::span<const int> y, std::span<const int> predictions);

}  // namespace phenoid::metrics

#endif  // PHENOID_METRICS_METRICS_H_
