#ifndef PHENOID_AUTOML_CV_H_
#define PHENOID_AUTOML_CV_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phenoid/automl/pipeline.h"

namespace phenoid::automl {

struct CvResult {
  double mean_auc = 0.0;
  std::vector<double> fold_auc;
  int folds = 0;
  std::vector<std::string> warnings;
};

// Fold index per row. Each class is shuffled by seed and dealt round-robin,
// so every fold receives floor or ceil of its share of each class.
std::vector<int> StratifiedFolds(std::span<const int> y, int folds, uint64_t seed);

// Returns validation scores for `valid` after fitting on (train, y_train).
using FoldFitter = std::function<std::vector<double>(const features::FeatureMatrix& train,
                                                     std::span<const int> y_train,
                                                     const features::FeatureMatrix& valid)>;

// Mean validation AUC-ROC over stratified folds. When the smaller class has
// fewer than `folds` rows the fold count drops to that size (warning); fewer
// than 2 rows in a class -> Error(kInsufficientLabels).
CvResult CrossValidate(const features::FeatureMatrix& m, std::span<const int> y, int folds,
                       uint64_t seed, const FoldFitter& fitter);

// Cross-validates the whole pipeline: selection, imputation and
// standardization are refit inside each fold.
CvResult CvScore(const TrialConfig& config, const features::FeatureMatrix& m,
                 std::span<const int> y, std::span<const std::string> allowed, int folds,
                 uint64_t seed, const PipelineOptions& options = {});

}  // namespace phenoid::automl

#endif  // PHENOID_AUTOML_CV_H_
