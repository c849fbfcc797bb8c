#ifndef PHENOID_AUTOML_PIPELINE_H_
#define PHENOID_AUTOML_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "phenoid/automl/classifier.h"
#include "phenoid/features/imputer.h"
#include "phenoid/features/matrix.h"
#include "phenoid/features/selection.h"

namespace phenoid::automl {

// One search candidate. k = 0 means "all allowed columns".
struct TrialConfig {
  Family family = Family::kLogisticRegression;
  Hyperparameters hyperparameters;
  size_t k = 0;
  double resource = 1.0;

  nlohmann::json ToJson() const;
  static TrialConfig FromJson(const nlohmann::json& j);
  std::string Describe() const;
  bool operator==(const TrialConfig&) const = default;
};

struct PipelineOptions {
  features::SelectionMethod selection = features::SelectionMethod::kMutualInformation;
  bool standardize = true;
  Execution execution = Execution::kParallel;
};

// Column selection, imputation and a fitted classifier, applied to raw
// feature matrices by column name.
class TrainedClassifier {
 public:
  static constexpr int kFormatVersion = 1;

  // `allowed` restricts candidate columns (empty: every column).
  static TrainedClassifier Fit(const features::FeatureMatrix& train, std::span<const int> y,
                               const TrialConfig& config, std::span<const std::string> allowed,
                               uint64_t seed, const PipelineOptions& options = {});

  // Selected columns of `m`, imputed and standardized; missing column -> kMask.
  features::DenseMatrix Transform(const features::FeatureMatrix& m) const;
  std::vector<double> PredictProba(const features::FeatureMatrix& m) const;

  const std::vector<std::string>& feature_names() const { return features_; }
  const Classifier& model() const { return *model_; }
  const features::Imputer& imputer() const { return imputer_; }
  const TrialConfig& config() const { return config_; }
  uint64_t seed() const { return seed_; }
  bool standardize() const { return standardize_; }

  nlohmann::json ToJson() const;
  static TrainedClassifier FromJson(const nlohmann::json& j);
  void Save(const std::string& path) const;
  static TrainedClassifier Load(const std::string& path);

 private:
  TrialConfig config_;
  uint64_t seed_ = 0;
  bool standardize_ = true;
  std::vector<std::string> features_;
  features::Imputer imputer_;
  std::shared_ptr<const Classifier> model_;
};

}  // namespace phenoid::automl

#endif  // PHENOID_AUTOML_PIPELINE_H_
