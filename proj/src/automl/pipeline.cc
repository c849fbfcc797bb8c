#include "phenoid/automl/pipeline.h"

#include <sstream>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::automl {

nlohmann::json TrialConfig::ToJson() const {
  return {{"family", FamilyName(family)},
          {"hyperparameters", hyperparameters},
          {"k", k},
          {"resource", resource}};
}

TrialConfig TrialConfig::FromJson(const nlohmann::json& j) {
  TrialConfig c;
  c.family = ParseFamily(j.at("family").get<std::string>());
  c.hyperparameters = j.at("hyperparameters").get<Hyperparameters>();
  c.k = j.at("k").get<size_t>();
  c.resource = j.at("resource").get<double>();
  return c;
}

std::string TrialConfig::Describe() const {
  std::ostringstream out;
  out << FamilyName(family) << " k=" << (k == 0 ? std::string("all") : std::to_string(k));
  for (const auto& [name, value] : hyperparameters) out << ' ' << name << '=' << FormatDouble(value);
  return out.str();
}

TrainedClassifier TrainedClassifier::Fit(const features::FeatureMatrix& train,
                                         std::span<const int> y, const TrialConfig& config,
                                         std::span<const std::string> allowed, uint64_t seed,
                                         const PipelineOptions& options) {
  if (train.rows() != y.size()) throw Error(ErrorCode::kShape, "rows and labels differ");
  std::vector<std::string> candidates;
  if (allowed.empty()) {
    candidates = train.column_names();
  } else {
    // Keep matrix order regardless of the order of `allowed`.
    for (const std::string& name : train.column_names()) {
      for (const std::string& a : allowed) {
        if (a == name) {
          candidates.push_back(name);
          break;
        }
      }
    }
    if (candidates.size() != allowed.size()) {
      throw Error(ErrorCode::kMask, "mask names a column the matrix lacks");
    }
  }
  if (candidates.empty()) throw Error(ErrorCode::kMask, "no feature columns to train on");

  TrainedClassifier out;
  out.config_ = config;
  out.seed_ = seed;
  out.standardize_ = options.standardize;
  if (config.k == 0 || config.k >= candidates.size()) {
    out.features_ = candidates;
  } else {
    out.features_ = features::SelectTopK(train, y, config.k, options.selection, candidates).active;
  }
  features::FeatureMatrix sub = train.SelectColumns(out.features_);
  out.imputer_ = features::Imputer::Fit(sub);
  features::FeatureMatrix ready = out.imputer_.Apply(sub, out.standardize_);
  FitContext ctx{config.resource, seed, options.execution};
  out.model_ = FitFamily(config.family, ready.values(), y, config.hyperparameters, ctx);
  return out;
}

features::DenseMatrix TrainedClassifier::Transform(const features::FeatureMatrix& m) const {
  return imputer_.Apply(m.SelectColumns(features_), standardize_).values();
}

std::vector<double> TrainedClassifier::PredictProba(const features::FeatureMatrix& m) const {
  return model_->PredictProba(Transform(m));
}

nlohmann::json TrainedClassifier::ToJson() const {
  return {{"format", "phenoid-model"},
          {"version", kFormatVersion},
          {"config", config_.ToJson()},
          {"seed", seed_},
          {"standardize", standardize_},
          {"features", features_},
          {"imputer", imputer_.ToJson()},
          {"classifier", model_->ToJson()}};
}

TrainedClassifier TrainedClassifier::FromJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "phenoid-model") {
      throw Error(ErrorCode::kParse, "not a phenoid model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion) {
      throw Error(ErrorCode::kParse, "unsupported model version " + std::to_string(version));
    }
    TrainedClassifier out;
    out.config_ = TrialConfig::FromJson(j.at("config"));
    out.seed_ = j.at("seed").get<uint64_t>();
    out.standardize_ = j.at("standardize").get<bool>();
    out.features_ = j.at("features").get<std::vector<std::string>>();
    out.imputer_ = features::Imputer::FromJson(j.at("imputer"));
    out.model_ = ClassifierFromJson(j.at("classifier"));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed model file: ") + e.what());
  }
}

void TrainedClassifier::Save(const std::string& path) const {
  WriteFileAtomic(path, ToJson().dump() + "\n");
}

TrainedClassifier TrainedClassifier::Load(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
  return FromJson(j);
}

}  // namespace phenoid::automl
