#include "phenoid/automl/classifier.h"

#include <algorithm>
#include <cmath>

#include "phenoid/automl/models.h"
#include "phenoid/common/error.h"

namespace phenoid::automl {

std::string_view FamilyName(Family f) {
  switch (f) {
    case Family::kLogisticRegression: return "LogisticRegression";
    case Family::kLinearSvm: return "LinearSVM";
    case Family::kRandomForest: return "RandomForest";
    case Family::kGradientBoosting: return "GradientBoosting";
    case Family::kMlp: return "MLP";
  }
  return "?";
}

Family ParseFamily(std::string_view name) {
  for (Family f : AllFamilies()) {
    if (FamilyName(f) == name) return f;
  }
  throw Error(ErrorCode::kConfig, "unknown classifier family: " + std::string(name));
}

std::vector<Family> AllFamilies() {
  return {Family::kLogisticRegression, Family::kLinearSvm, Family::kRandomForest,
          Family::kGradientBoosting, Family::kMlp};
}

double GetParam(const Hyperparameters& hp, const std::string& name, double fallback) {
  auto it = hp.find(name);
  return it == hp.end() ? fallback : it->second;
}

std::vector<double> Classifier::PredictProba(const features::DenseMatrix& x) const {
  std::vector<double> out(x.rows);
  for (size_t r = 0; r < x.rows; ++r) out[r] = PredictProba(x.row(r));
  return out;
}

int ScaledIterations(double resource, int full) {
  // Guard against 1/3 * 3 landing a hair above an integer.
  const double scaled = std::ceil(resource * full - 1e-9);
  return std::max(1, static_cast<int>(scaled));
}

void ValidateTrainingData(const features::DenseMatrix& x, std::span<const int> y) {
  if (x.rows != y.size()) {
    throw Error(ErrorCode::kShape, "feature rows and labels differ in length");
  }
  size_t pos = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::kFit, "labels must be 0 or 1");
    pos += static_cast<size_t>(v);
  }
  if (pos == 0 || pos == y.size()) {
    throw Error(ErrorCode::kFit, "training labels contain a single class");
  }
  for (double v : x.data) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kData, "non-finite feature value");
  }
}

std::unique_ptr<Classifier> FitFamily(Family family, const features::DenseMatrix& x,
                                      std::span<const int> y, const Hyperparameters& hp,
                                      const FitContext& ctx) {
  ValidateTrainingData(x, y);
  if (!(ctx.resource > 0.0 && ctx.resource <= 1.0)) {
    throw Error(ErrorCode::kConfig, "resource must lie in (0, 1]");
  }
  switch (family) {
    case Family::kLogisticRegression: return LogisticModel::Fit(x, y, hp, ctx);
    case Family::kLinearSvm: return LinearSvmModel::Fit(x, y, hp, ctx);
    case Family::kRandomForest: return RandomForestModel::Fit(x, y, hp, ctx);
    case Family::kGradientBoosting: return GradientBoostingModel::Fit(x, y, hp, ctx);
    case Family::kMlp: return MlpModel::Fit(x, y, hp, ctx);
  }
  throw Error(ErrorCode::kConfig, "unknown family");
}

std::unique_ptr<Classifier> ClassifierFromJson(const nlohmann::json& j) {
  try {
    switch (ParseFamily(j.at("family").get<std::string>())) {
      case Family::kLogisticRegression: return LogisticModel::FromJson(j);
      case Family::kLinearSvm: return LinearSvmModel::FromJson(j);
      case Family::kRandomForest: return RandomForestModel::FromJson(j);
      case Family::kGradientBoosting: return GradientBoostingModel::FromJson(j);
      case Family::kMlp: return MlpModel::FromJson(j);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed classifier: ") + e.what());
  }
  throw Error(ErrorCode::kParse, "malformed classifier");
}

}  // namespace phenoid::automl
