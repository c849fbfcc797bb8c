#ifndef PHENOID_LOOP_ORCHESTRATOR_H_
#define PHENOID_LOOP_ORCHESTRATOR_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phenoid/automl/pipeline.h"
#include "phenoid/corpus/admission.h"
#include "phenoid/corpus/split.h"
#include "phenoid/features/matrix.h"
#include "phenoid/hpo/extractor.h"
#include "phenoid/loop/events.h"
#include "phenoid/loop/state.h"
#include "phenoid/shap/importance.h"
#include "phenoid/synth/oracle.h"

namespace phenoid::loop {

// State-machine violation. `required_state` names what the run must be in.
class ConflictError : public Error {
 public:
  ConflictError(const std::string& message, std::string required_state)
      : Error(ErrorCode::kConflict, message), required_state_(std::move(required_state)) {}
  const std::string& required_state() const { return required_state_; }

 private:
  std::string required_state_;
};

// Everything derived deterministically from (corpus, config). Rebuilt rather
// than persisted: the event log plus this data reproduce a run.
struct RunData {
  std::vector<corpus::EhrAdmission> corpus;
  features::FeatureMatrix matrix;  // one row per admission, raw (may have gaps)
  std::vector<hpo::ExtractionResult> extractions;
  std::vector<corpus::CohortVerdict> icd;
  corpus::DatasetSplit split;
  // Admission rows on each side, Excluded admissions dropped.
  std::vector<size_t> train_rows;
  std::vector<size_t> test_rows;
  std::map<std::string, size_t> row_of;
  size_t excluded = 0;

  size_t Row(const std::string& admission_id) const;  // kNotFound if absent
  int IcdLabel(size_t row) const { return icd[row] == corpus::CohortVerdict::kPositive; }
};

// Phenotype columns are those seen (non-negated) in some training admission;
// all catalog features are kept.
std::shared_ptr<const RunData> PrepareRunData(std::vector<corpus::EhrAdmission> corpus,
                                              const LoopConfig& config,
                                              const hpo::PhenotypeExtractor& extractor,
                                              const corpus::StructuredFeatureCatalog& catalog,
                                              Execution execution = Execution::kParallel);

struct QueueItem {
  std::string admission_id;
  QueueRole role = QueueRole::kTrain;
  std::string note_text;
  std::vector<hpo::PhenotypeMention> mentions;
  std::map<std::string, double> structured;  // observed features only
  std::map<std::string, bool> labels;        // current labels by annotator

  nlohmann::json ToJson() const;
};

// Single writer for one run: validates each command against the folded state,
// computes its result, appends the event and applies it.
class Orchestrator {
 public:
  // Starts a new run; the log must be empty.
  static Orchestrator Create(std::shared_ptr<const RunData> data, const LoopConfig& config,
                             EventLog log);
  // Resumes from an existing log (state is the fold of its events).
  static Orchestrator Resume(std::shared_ptr<const RunData> data, EventLog log);

  const LoopState& state() const { return state_; }
  const EventLog& log() const { return log_; }
  const RunData& data() const { return *data_; }
  const LoopConfig& config() const { return *state_.config; }

  // Initial random forest on ICD labels and the two quadrant samples.
  void TrainInitial(Execution execution = Execution::kParallel);
  void RecordLabel(const std::string& admission_id, const std::string& annotator, bool label);
  // First queued admission without consensus that `annotator` has not labeled.
  std::optional<QueueItem> NextQueueItem(const std::string& annotator) const;
  QueueItem MakeQueueItem(const std::string& admission_id) const;
  // Throws exactly what Iterate would throw before doing any work.
  void CheckCanIterate() const;
  // Search on gold training labels restricted to the mask, then SHAP review.
  void Iterate(Execution execution = Execution::kParallel);
  void RecordVerdicts(const std::string& reviewer,
                      const std::map<std::string, synth::FeatureVerdict>& verdicts);
  void Reinstate(const std::string& feature, const std::string& reviewer);
  // After a terminal status: sample predicted positives of the test side.
  void StartEstimate();
  void RecordFailure(const std::string& message);

  std::vector<RankedFeature> TopFeatures(size_t m) const;
  automl::TrainedClassifier CurrentModel() const;
  shap::Explanation Explain(const std::string& admission_id) const;
  // Gold test metrics of the latest model plus the ICD rule on the same rows.
  nlohmann::json Metrics() const;

  // Explains `rows` with the shared loop SHAP settings.
  std::vector<shap::Explanation> ExplainRows(const automl::TrainedClassifier& model,
                                             const std::vector<size_t>& rows, uint64_t seed,
                                             Execution execution) const;

 private:
  Orchestrator(std::shared_ptr<const RunData> data, EventLog log);
  void Append(const std::string& type, nlohmann::json payload);
  void RequireStatus(std::initializer_list<Status> allowed, const std::string& action) const;

  std::shared_ptr<const RunData> data_;
  EventLog log_;
  LoopState state_;
};

}  // namespace phenoid::loop

#endif  // PHENOID_LOOP_ORCHESTRATOR_H_
