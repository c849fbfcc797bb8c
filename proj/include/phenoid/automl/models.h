#ifndef PHENOID_AUTOML_MODELS_H_
#define PHENOID_AUTOML_MODELS_H_

#include <memory>
#include <span>
#include <vector>

#include "phenoid/automl/classifier.h"
#include "phenoid/automl/tree.h"

namespace phenoid::automl {

// L2-regularized logistic regression. Hyperparameters: lambda.
class LogisticModel : public Classifier {
 public:
  static constexpr int kMaxEpochs = 200;

  LogisticModel(std::vector<double> w, double b) : w_(std::move(w)), b_(b) {}
  static std::unique_ptr<LogisticModel> Fit(const features::DenseMatrix& x, std::span<const int> y,
                                            const Hyperparameters& hp, const FitContext& ctx);
  static std::unique_ptr<LogisticModel> FromJson(const nlohmann::json& j);

  Family family() const override { return Family::kLogisticRegression; }
  double PredictProba(std::span<const double> x) const override;
  nlohmann::json ToJson() const override;
  double Decision(std::span<const double> x) const;
  const std::vector<double>& weights() const { return w_; }

 private:
  std::vector<double> w_;
  double b_;
};

// Linear SVM trained with averaged stochastic subgradient descent on the
// regularized hinge loss, then Platt-calibrated. Hyperparameters: lambda.
class LinearSvmModel : public Classifier {
 public:
  static constexpr int kMaxEpochs = 50;

  LinearSvmModel(std::vector<double> w, double b, double platt_a, double platt_b)
      : w_(std::move(w)), b_(b), platt_a_(platt_a), platt_b_(platt_b) {}
  static std::unique_ptr<LinearSvmModel> Fit(const features::DenseMatrix& x,
                                             std::span<const int> y, const Hyperparameters& hp,
                                             const FitContext& ctx);
  static std::unique_ptr<LinearSvmModel> FromJson(const nlohmann::json& j);

  Family family() const override { return Family::kLinearSvm; }
  double PredictProba(std::span<const double> x) const override;
  nlohmann::json ToJson() const override;
  double Decision(std::span<const double> x) const;

 private:
  std::vector<double> w_;
  double b_;
  double platt_a_;
  double platt_b_;
};

// Fits P(y=1|f) = 1 / (1 + exp(a*f + b)) on decision values with Platt's
// smoothed targets, by Newton's method with backtracking. Returns {a, b}.
std::pair<double, double> FitPlattSigmoid(std::span<const double> decision,
                                          std::span<const int> y);

// Bagged Gini trees with sqrt(d) features per split.
// Hyperparameters: n_trees, max_depth (-1 unbounded).
class RandomForestModel : public Classifier {
 public:
  static constexpr int kDefaultTrees = 100;

  explicit RandomForestModel(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {}
  static std::unique_ptr<RandomForestModel> Fit(const features::DenseMatrix& x,
                                                std::span<const int> y, const Hyperparameters& hp,
                                                const FitContext& ctx);
  static std::unique_ptr<RandomForestModel> FromJson(const nlohmann::json& j);

  Family family() const override { return Family::kRandomForest; }
  double PredictProba(std::span<const double> x) const override;
  nlohmann::json ToJson() const override;
  const std::vector<DecisionTree>& trees() const { return trees_; }
  // Out-of-bag probability for each training row, replaying the bootstrap
  // draws of a forest fit on `x` with `seed`. Rows in every bag fall back to
  // the full forest.
  std::vector<double> OutOfBag(const features::DenseMatrix& x, uint64_t seed) const;

 private:
  std::vector<DecisionTree> trees_;
};

// Logistic-loss gradient boosting with Newton leaves.
// Hyperparameters: n_rounds, max_depth, shrinkage.
class GradientBoostingModel : public Classifier {
 public:
  static constexpr int kDefaultRounds = 100;

  GradientBoostingModel(double init, double shrinkage, std::vector<DecisionTree> trees)
      : init_(init), shrinkage_(shrinkage), trees_(std::move(trees)) {}
  static std::unique_ptr<GradientBoostingModel> Fit(const features::DenseMatrix& x,
                                                    std::span<const int> y,
                                                    const Hyperparameters& hp,
                                                    const FitContext& ctx);
  static std::unique_ptr<GradientBoostingModel> FromJson(const nlohmann::json& j);

  Family family() const override { return Family::kGradientBoosting; }
  double PredictProba(std::span<const double> x) const override;
  nlohmann::json ToJson() const override;

 private:
  double init_;
  double shrinkage_;
  std::vector<DecisionTree> trees_;
};

// Fully connected ReLU network with a logistic output unit.
// Hyperparameters: width, layers (1 or 2), step.
class MlpModel : public Classifier {
 public:
  static constexpr int kMaxEpochs = 100;
  static constexpr size_t kBatchSize = 32;

  struct Layer {
    size_t in = 0;
    size_t out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;
  };

  explicit MlpModel(std::vector<Layer> layers) : layers_(std::move(layers)) {}
  static std::unique_ptr<MlpModel> Fit(const features::DenseMatrix& x, std::span<const int> y,
                                       const Hyperparameters& hp, const FitContext& ctx);
  static std::unique_ptr<MlpModel> FromJson(const nlohmann::json& j);

  Family family() const override { return Family::kMlp; }
  double PredictProba(std::span<const double> x) const override;
  nlohmann::json ToJson() const override;

 private:
  std::vector<Layer> layers_;
};

}  // namespace phenoid::automl

#endif  // PHENOID_AUTOML_MODELS_H_
