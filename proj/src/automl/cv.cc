#include "phenoid/automl/cv.h"

#include <algorithm>

#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"
#include "phenoid/metrics/metrics.h"

namespace phenoid::automl {

std::vector<int> StratifiedFolds(std::span<const int> y, int folds, uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::kConfig, "need at least 2 folds");
  Rng rng(DeriveSeed(seed, "folds"));
  std::vector<int> assignment(y.size(), 0);
  int offset = 0;
  for (int cls : {1, 0}) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) idx.push_back(i);
    }
    rng.Shuffle(idx);
    for (size_t k = 0; k < idx.size(); ++k) {
      assignment[idx[k]] = static_cast<int>((k + static_cast<size_t>(offset)) % folds);
    }
    // Continue dealing where the first class stopped to balance fold sizes.
    offset = static_cast<int>((idx.size() + static_cast<size_t>(offset)) % folds);
  }
  return assignment;
}

CvResult CrossValidate(const features::FeatureMatrix& m, std::span<const int> y, int folds,
                       uint64_t seed, const FoldFitter& fitter) {
  if (m.rows() != y.size()) throw Error(ErrorCode::kShape, "rows and labels differ");
  const size_t pos = static_cast<size_t>(std::count(y.begin(), y.end(), 1));
  const size_t minority = std::min(pos, y.size() - pos);
  CvResult result;
  if (minority < 2) {
    throw Error(ErrorCode::kInsufficientLabels,
                "cross-validation needs at least 2 rows of each class");
  }
  if (minority < static_cast<size_t>(folds)) {
    result.warnings.push_back("folds reduced from " + std::to_string(folds) + " to " +
                              std::to_string(minority) + " (smallest class size)");
    folds = static_cast<int>(minority);
  }
  result.folds = folds;
  const std::vector<int> assignment = StratifiedFolds(y, folds, seed);
  double total = 0.0;
  for (int f = 0; f < folds; ++f) {
    std::vector<size_t> train_rows, valid_rows;
    std::vector<int> y_train, y_valid;
    for (size_t i = 0; i < y.size(); ++i) {
      if (assignment[i] == f) {
        valid_rows.push_back(i);
        y_valid.push_back(y[i]);
      } else {
        train_rows.push_back(i);
        y_train.push_back(y[i]);
      }
    }
    const std::vector<double> scores = fitter(m.SelectRows(train_rows), y_train,
                                              m.SelectRows(valid_rows));
    const double auc = metrics::AucRoc(y_valid, scores);
    result.fold_auc.push_back(auc);
    total += auc;
  }
  result.mean_auc = total / folds;
  return result;
}

CvResult CvScore(const TrialConfig& config, const features::FeatureMatrix& m,
                 std::span<const int> y, std::span<const std::string> allowed, int folds,
                 uint64_t seed, const PipelineOptions& options) {
  int fold_index = 0;
  return CrossValidate(
      m, y, folds, seed,
      [&](const features::FeatureMatrix& train, std::span<const int> y_train,
          const features::FeatureMatrix& valid) {
        const uint64_t fold_seed = DeriveSeed(seed, static_cast<uint64_t>(fold_index++));
        TrainedClassifier model =
            TrainedClassifier::Fit(train, y_train, config, allowed, fold_seed, options);
        return model.PredictProba(valid);
      });
}

}  // namespace phenoid::automl
