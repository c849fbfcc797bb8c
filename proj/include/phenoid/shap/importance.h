#ifndef PHENOID_SHAP_IMPORTANCE_H_
#define PHENOID_SHAP_IMPORTANCE_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phenoid/features/matrix.h"
#include "phenoid/shap/shapley.h"

namespace phenoid::shap {

enum class Direction { kPositive, kNegative, kMixed, kZero };

std::string_view DirectionName(Direction d);

struct FeatureImportance {
  std::string feature;
  double mean_abs = 0.0;
  double mean_phi = 0.0;
  size_t positive = 0;  // explanations with phi > 0
  size_t negative = 0;  // explanations with phi < 0
  Direction direction = Direction::kZero;
};

struct GlobalImportance {
  size_t n_explanations = 0;
  // Sorted by mean |phi| descending, ties by feature name.
  std::vector<FeatureImportance> ranked;

  std::vector<std::string> TopFeatures(size_t m) const;
  nlohmann::json ToJson() const;
};

// All explanations must share one feature list, else Error(kMask); an empty
// set is also rejected with kMask.
GlobalImportance ComputeGlobalImportance(const std::vector<Explanation>& explanations);

// Importance of the union of two explanation sets, from their summaries.
GlobalImportance MergeImportance(const GlobalImportance& a, const GlobalImportance& b);

// One line per (feature, explanation): feature,admission_id,phi,value. Raw
// values come from `raw` (blank when missing). Features follow importance order.
std::string ExportBeeswarm(const std::vector<Explanation>& explanations,
                           const features::FeatureMatrix& raw);

struct WaterfallStep {
  std::string feature;
  double phi = 0.0;
  double cumulative = 0.0;  // base_value plus every phi up to this step
};

// Features by |phi| descending (ties by name); the last cumulative value is
// base_value + sum(phi).
std::vector<WaterfallStep> Waterfall(const Explanation& e);
std::string ExportWaterfall(const Explanation& e);

nlohmann::json ExplanationToJson(const Explanation& e);

}  // namespace phenoid::shap

#endif  // PHENOID_SHAP_IMPORTANCE_H_
