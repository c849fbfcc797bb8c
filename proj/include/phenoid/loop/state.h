#ifndef PHENOID_LOOP_STATE_H_
#define PHENOID_LOOP_STATE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phenoid/automl/search.h"
#include "phenoid/corpus/criteria.h"
#include "phenoid/loop/estimate.h"
#include "phenoid/loop/events.h"
#include "phenoid/loop/quadrant.h"

namespace phenoid::loop {

enum class Status {
  kInitializing,      // run created, initial classifier not trained yet
  kAwaitingLabels,
  kAwaitingVerdicts,
  kReadyToTrain,      // verdicts recorded for the latest iteration
  kConverged,
  kMaxIterations,
};

std::string_view StatusName(Status s);
bool IsTerminal(Status s);

// Immutable per-run settings.
struct LoopConfig {
  std::string disease;
  // Custom ICD rule; when inclusion is empty the disease name selects a
  // built-in rule.
  std::string inclusion;
  std::string exclusion;
  std::string background;

  uint64_t seed = 0;
  double train_fraction = 0.8;
  size_t quota = 25;
  int required_annotators = 3;
  size_t m_top = 20;
  double epsilon = 0.01;
  int max_iterations = 3;
  size_t min_labels_per_class = 10;
  size_t estimate_sample = 100;
  int initial_trees = 100;

  // Search space for each iteration.
  std::vector<std::string> families = {"LogisticRegression", "LinearSVM", "RandomForest",
                                       "GradientBoosting", "MLP"};
  std::vector<size_t> k_grid = {16, 64, 256, 0};
  int max_resource = 9;
  int eta = 3;
  int folds = 5;
  double budget_seconds = 120.0;

  size_t shap_background = 100;
  size_t shap_coalitions = 0;  // 0: default for the feature count

  corpus::DiseaseCriteria Criteria() const;
  automl::SearchSpace Space(int iteration) const;
  void Validate() const;

  nlohmann::json ToJson() const;
  static LoopConfig FromJson(const nlohmann::json& j);
};

struct GoldLabel {
  std::map<std::string, bool> labels;  // annotator -> label
  std::optional<bool> consensus;

  // Consensus needs at least `required` labels and a strict majority.
  void Recompute(int required);
};

enum class QueueRole { kTrain, kTest, kEstimate };
std::string_view QueueRoleName(QueueRole r);

struct VerdictEntry {
  std::string feature;
  bool relevant = true;
  int iteration = 0;
  std::string reviewer;
};

struct RankedFeature {
  std::string feature;
  double mean_abs_phi = 0.0;
  double mean_phi = 0.0;
  std::string direction;
};

struct IterationRecord {
  int iteration = 0;
  double score = 0.0;                    // best cross-validated AUC-ROC
  std::vector<std::string> mask;         // features the search could use
  nlohmann::json best_config;
  std::vector<RankedFeature> importance;  // all model features, ranked
  nlohmann::json model;                  // serialized TrainedClassifier
  nlohmann::json search;                 // brackets and trial count
};

struct EstimateState {
  size_t n_pred = 0;
  std::vector<std::string> sample;
  std::optional<EvaluationEstimate> result;  // set once every sample is labeled
};

struct LoopState {
  std::optional<LoopConfig> config;
  Status status = Status::kInitializing;
  std::vector<std::string> all_features;
  std::vector<std::string> mask;  // current active features, matrix order
  QuadrantSample train_sample;
  QuadrantSample test_sample;
  std::vector<std::string> queue;  // labeling order, unique ids
  std::map<std::string, QueueRole> roles;
  std::map<std::string, GoldLabel> gold;
  std::vector<VerdictEntry> verdicts;
  std::vector<IterationRecord> iterations;
  std::optional<EstimateState> estimate;
  std::string last_error;  // failure of the latest background job, if any

  int iteration() const { return static_cast<int>(iterations.size()); }
  // Consensus labels of queued ids with the given role, in queue order.
  std::vector<std::pair<std::string, bool>> ConsensusLabels(QueueRole role) const;
  bool InQueue(const std::string& id) const { return roles.count(id) > 0; }

  nlohmann::json ToJson() const;
  bool operator==(const LoopState& o) const { return ToJson() == o.ToJson(); }
};

// Event type names.
inline constexpr const char* kRunCreated = "run_created";
inline constexpr const char* kInitialTrained = "initial_trained";
inline constexpr const char* kLabelRecorded = "label_recorded";
inline constexpr const char* kIterationCompleted = "iteration_completed";
inline constexpr const char* kVerdictsRecorded = "verdicts_recorded";
inline constexpr const char* kFeatureReinstated = "feature_reinstated";
inline constexpr const char* kEstimateSampled = "estimate_sampled";
inline constexpr const char* kJobFailed = "job_failed";

// Pure transition function; events are facts and are never rejected here
// (validation happens before they are appended). Unknown types -> kParse.
void ApplyEvent(LoopState& state, const Event& event);
LoopState FoldEvents(const std::vector<Event>& events);

}  // namespace phenoid::loop

#endif  // PHENOID_LOOP_STATE_H_
