#include <cmath>

#include "phenoid/automl/search.h"

namespace phenoid::automl {

namespace {

double LogUniform(Rng& rng, double lo, double hi) {
  return std::exp(rng.Uniform(std::log(lo), std::log(hi)));
}

template <size_t N>
double Choice(Rng& rng, const double (&values)[N]) {
  return values[rng.Index(N)];
}

bool InSet(double v, std::initializer_list<double> set) {
  for (double s : set) {
    if (v == s) return true;
  }
  return false;
}

bool InRange(const Hyperparameters& hp, const char* name, double lo, double hi) {
  auto it = hp.find(name);
  return it != hp.end() && it->second >= lo && it->second <= hi;
}

bool InChoices(const Hyperparameters& hp, const char* name, std::initializer_list<double> set) {
  auto it = hp.find(name);
  return it != hp.end() && InSet(it->second, set);
}

}  // namespace

void SearchSpace::Validate() const {
  if (families.empty()) throw Error(ErrorCode::kConfig, "search space has no families");
  if (k_grid.empty()) throw Error(ErrorCode::kConfig, "feature-count grid is empty");
  if (max_resource < 1) throw Error(ErrorCode::kConfig, "max resource must be >= 1");
  if (eta < 2) throw Error(ErrorCode::kConfig, "halving factor must be >= 2");
  if (folds < 2) throw Error(ErrorCode::kConfig, "need at least 2 folds");
  if (!(budget_seconds >= 0.0)) throw Error(ErrorCode::kConfig, "budget must be >= 0");
}

Hyperparameters SampleHyperparameters(Family family, Rng& rng) {
  static constexpr double kRfDepth[] = {4, 8, 16, -1};
  static constexpr double kGbDepth[] = {2, 3, 4};
  static constexpr double kWidth[] = {16, 64, 256};
  static constexpr double kLayers[] = {1, 2};
  switch (family) {
    case Family::kLogisticRegression:
    case Family::kLinearSvm:
      return {{"lambda", LogUniform(rng, 1e-4, 10.0)}};
    case Family::kRandomForest: {
      const double trees = 10.0 + static_cast<double>(rng.Index(191));
      return {{"n_trees", trees}, {"max_depth", Choice(rng, kRfDepth)}};
    }
    case Family::kGradientBoosting: {
      const double rounds = 10.0 + static_cast<double>(rng.Index(191));
      const double depth = Choice(rng, kGbDepth);
      return {{"n_rounds", rounds}, {"max_depth", depth},
              {"shrinkage", LogUniform(rng, 0.01, 0.3)}};
    }
    case Family::kMlp: {
      const double width = Choice(rng, kWidth);
      const double layers = Choice(rng, kLayers);
      return {{"width", width}, {"layers", layers}, {"step", LogUniform(rng, 1e-4, 1e-1)}};
    }
  }
  return {};
}

bool HyperparametersInDomain(Family family, const Hyperparameters& hp) {
  switch (family) {
    case Family::kLogisticRegression:
    case Family::kLinearSvm:
      return InRange(hp, "lambda", 1e-4, 10.0);
    case Family::kRandomForest:
      return InRange(hp, "n_trees", 1, 200) && InChoices(hp, "max_depth", {4, 8, 16, -1});
    case Family::kGradientBoosting:
      return InRange(hp, "n_rounds", 1, 200) && InChoices(hp, "max_depth", {2, 3, 4}) &&
             InRange(hp, "shrinkage", 0.01, 0.3);
    case Family::kMlp:
      return InChoices(hp, "width", {16, 64, 256}) && InChoices(hp, "layers", {1, 2}) &&
             InRange(hp, "step", 1e-4, 1e-1);
  }
  return false;
}

}  // namespace phenoid::automl
