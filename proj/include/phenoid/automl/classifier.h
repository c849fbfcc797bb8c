#ifndef PHENOID_AUTOML_CLASSIFIER_H_
#define PHENOID_AUTOML_CLASSIFIER_H_

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phenoid/common/parallel.h"
#include "phenoid/features/matrix.h"

namespace phenoid::automl {

enum class Family { kLogisticRegression, kLinearSvm, kRandomForest, kGradientBoosting, kMlp };

std::string_view FamilyName(Family f);
Family ParseFamily(std::string_view name);
std::vector<Family> AllFamilies();

using Hyperparameters = std::map<std::string, double>;

double GetParam(const Hyperparameters& hp, const std::string& name, double fallback);

// Fitted probabilistic binary classifier over a dense, complete input space.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Family family() const = 0;
  // P(y = 1 | x), always in [0, 1].
  virtual double PredictProba(std::span<const double> x) const = 0;
  virtual nlohmann::json ToJson() const = 0;

  std::vector<double> PredictProba(const features::DenseMatrix& x) const;
};

struct FitContext {
  double resource = 1.0;  // fraction of full training effort, in (0, 1]
  uint64_t seed = 0;
  Execution execution = Execution::kParallel;
};

// Resource scaling shared by all families: ceil(resource * full), at least 1.
int ScaledIterations(double resource, int full);

// Validates inputs (both classes present, finite values), then dispatches.
// Errors: single-class y -> kFit; non-finite x -> kData.
std::unique_ptr<Classifier> FitFamily(Family family, const features::DenseMatrix& x,
                                      std::span<const int> y, const Hyperparameters& hp,
                                      const FitContext& ctx);

std::unique_ptr<Classifier> ClassifierFromJson(const nlohmann::json& j);

void ValidateTrainingData(const features::DenseMatrix& x, std::span<const int> y);

inline double Sigmoid(double z) {
  if (z >= 0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace phenoid::automl

#endif  // PHENOID_AUTOML_CLASSIFIER_H_
