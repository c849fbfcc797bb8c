#ifndef PHENOID_AUTOML_SEARCH_H_
#define PHENOID_AUTOML_SEARCH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phenoid/automl/pipeline.h"
#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"

namespace phenoid::automl {

struct SearchSpace {
  std::vector<Family> families = AllFamilies();
  // Feature-count grid; 0 stands for "all allowed columns".
  std::vector<size_t> k_grid = {16, 64, 256, 0};
  // Families listed here always use these hyperparameters instead of sampling.
  std::map<Family, Hyperparameters> fixed;
  int max_resource = 9;  // R
  int eta = 3;
  double budget_seconds = 120.0;
  int folds = 5;
  uint64_t seed = 0;
  PipelineOptions pipeline;

  void Validate() const;
};

// Uniform draw from the default domain of `family`.
Hyperparameters SampleHyperparameters(Family family, Rng& rng);
// True when every value lies in the default domain.
bool HyperparametersInDomain(Family family, const Hyperparameters& hp);

struct TrialRecord {
  int trial_id = 0;
  int config_id = 0;
  int bracket = 0;  // s
  int rung = 0;
  TrialConfig config;  // config.resource is the fraction r used
  double score = 0.0;  // mean CV AUC-ROC; NaN when the fit failed
  double wall_seconds = 0.0;
  bool promoted = false;
  std::string note;

  // Equality ignoring wall time.
  bool SameOutcome(const TrialRecord& o) const;
};

struct BracketSummary {
  int s = 0;
  std::vector<int> rung_sizes;
  // Sum over rungs of configs x resource, in units of one full-resource fit
  // divided by R (so a full fit costs R).
  double resource_used = 0.0;
};

struct SearchResult {
  TrialConfig best;
  int best_config_id = -1;
  double best_score = 0.0;
  std::vector<TrialRecord> history;
  std::vector<BracketSummary> brackets;
  bool budget_exhausted = false;
  std::optional<TrainedClassifier> model;  // refit on all data at r = 1
};

class BudgetError : public Error {
 public:
  BudgetError(const std::string& message, std::vector<TrialRecord> history)
      : Error(ErrorCode::kBudget, message), history_(std::move(history)) {}
  const std::vector<TrialRecord>& history() const { return history_; }

 private:
  std::vector<TrialRecord> history_;
};

// Initial configuration count of each bracket, s = s_max down to 0.
std::vector<int> BracketStartSizes(int max_resource, int eta);

// Hyperband over (family, hyperparameters, k) with CV AUC-ROC as objective.
// Survivors of each rung are the top floor(n / eta) (at least one).
SearchResult RunSearch(const SearchSpace& space, const features::FeatureMatrix& m,
                       std::span<const int> y, std::span<const std::string> allowed = {});

std::string FormatSearchReport(const SearchResult& result);
nlohmann::json SearchResultToJson(const SearchResult& result);

}  // namespace phenoid::automl

#endif  // PHENOID_AUTOML_SEARCH_H_
