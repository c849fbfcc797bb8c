#include "phenoid/loop/orchestrator.h"

#include <algorithm>

#include "phenoid/automl/models.h"
#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"
#include "phenoid/metrics/report.h"

namespace phenoid::loop {

size_t RunData::Row(const std::string& admission_id) const {
  auto it = row_of.find(admission_id);
  if (it == row_of.end()) throw Error(ErrorCode::kNotFound, "unknown admission " + admission_id);
  return it->second;
}

std::shared_ptr<const RunData> PrepareRunData(std::vector<corpus::EhrAdmission> corpus,
                                              const LoopConfig& config,
                                              const hpo::PhenotypeExtractor& extractor,
                                              const corpus::StructuredFeatureCatalog& catalog,
                                              Execution execution) {
  const corpus::DiseaseCriteria criteria = config.Criteria();
  auto data = std::make_shared<RunData>();
  features::BuildOptions options;
  options.execution = execution;
  features::BuiltMatrix built = features::BuildMatrix(corpus, extractor, catalog, options);
  data->split = corpus::SplitByPatient(corpus, config.train_fraction, config.seed);
  for (size_t r = 0; r < corpus.size(); ++r) {
    data->icd.push_back(corpus::ApplyIcdCriteria(corpus[r], criteria));
    if (data->icd.back() == corpus::CohortVerdict::kExcluded) {
      ++data->excluded;
      continue;
    }
    const bool train = data->split.train_ids.count(corpus[r].admission_id) > 0;
    (train ? data->train_rows : data->test_rows).push_back(r);
  }

  std::vector<std::string> kept;
  const features::FeatureMatrix& m = built.matrix;
  for (size_t c = 0; c < m.cols(); ++c) {
    bool keep = m.kinds()[c] == features::ColumnKind::kStructured;
    for (size_t i = 0; !keep && i < data->train_rows.size(); ++i) {
      keep = m.at(data->train_rows[i], c) != 0.0;
    }
    if (keep) kept.push_back(m.column_names()[c]);
  }
  data->matrix = m.SelectColumns(kept);
  data->extractions = std::move(built.extractions);
  for (size_t r = 0; r < corpus.size(); ++r) data->row_of[corpus[r].admission_id] = r;
  data->corpus = std::move(corpus);
  return data;
}

nlohmann::json QueueItem::ToJson() const {
  nlohmann::json mentions_json = nlohmann::json::array();
  for (const hpo::PhenotypeMention& m : mentions) {
    mentions_json.push_back({{"hpo_id", m.hpo_id},
                             {"start", m.start},
                             {"end", m.end},
                             {"text", m.matched_text},
                             {"negated", m.negated}});
  }
  return {{"admission_id", admission_id},
          {"role", QueueRoleName(role)},
          {"note_text", note_text},
          {"mentions", mentions_json},
          {"structured", structured},
          {"labels", labels}};
}

Orchestrator::Orchestrator(std::shared_ptr<const RunData> data, EventLog log)
    : data_(std::move(data)), log_(std::move(log)) {
  state_ = FoldEvents(log_.events());
}

Orchestrator Orchestrator::Create(std::shared_ptr<const RunData> data, const LoopConfig& config,
                                  EventLog log) {
  if (!log.events().empty()) throw Error(ErrorCode::kConflict, "run log is not empty");
  config.Validate();
  Orchestrator o(std::move(data), std::move(log));
  o.Append(kRunCreated, {{"config", config.ToJson()}});
  return o;
}

Orchestrator Orchestrator::Resume(std::shared_ptr<const RunData> data, EventLog log) {
  Orchestrator o(std::move(data), std::move(log));
  if (!o.state_.config) throw Error(ErrorCode::kParse, "run log lacks a run_created event");
  return o;
}

void Orchestrator::Append(const std::string& type, nlohmann::json payload) {
  const Event& e = log_.Append(type, std::move(payload));
  ApplyEvent(state_, e);
}

void Orchestrator::RequireStatus(std::initializer_list<Status> allowed,
                                 const std::string& action) const {
  for (Status s : allowed) {
    if (state_.status == s) return;
  }
  std::string required;
  for (Status s : allowed) {
    if (!required.empty()) required += " or ";
    required += StatusName(s);
  }
  throw ConflictError(action + " is not allowed while the run is " +
                          std::string(StatusName(state_.status)),
                      required);
}

void Orchestrator::TrainInitial(Execution execution) {
  RequireStatus({Status::kInitializing}, "initial training");
  const LoopConfig& c = config();
  const RunData& d = *data_;
  const features::FeatureMatrix train = d.matrix.SelectRows(d.train_rows);
  std::vector<int> y;
  for (size_t r : d.train_rows) y.push_back(d.IcdLabel(r));

  automl::TrialConfig rf;
  rf.family = automl::Family::kRandomForest;
  rf.hyperparameters = {{"n_trees", c.initial_trees}, {"max_depth", -1}};
  const uint64_t seed = DeriveSeed(c.seed, "initial");
  automl::PipelineOptions options;
  options.execution = execution;
  const automl::TrainedClassifier model =
      automl::TrainedClassifier::Fit(train, y, rf, {}, seed, options);
  // Training rows get out-of-bag scores so the quadrants reflect what the
  // forest generalizes, not what it memorized.
  const auto& forest = dynamic_cast<const automl::RandomForestModel&>(model.model());
  const std::vector<double> train_prob = forest.OutOfBag(model.Transform(train), seed);
  const features::FeatureMatrix test = d.matrix.SelectRows(d.test_rows);
  const std::vector<double> test_prob = model.PredictProba(test);

  std::vector<int> test_y;
  for (size_t r : d.test_rows) test_y.push_back(d.IcdLabel(r));
  const QuadrantSample train_sample = SampleQuadrants(
      train.row_ids(), train_prob, y, c.quota, DeriveSeed(c.seed, "quadrants-train"));
  const QuadrantSample test_sample = SampleQuadrants(
      test.row_ids(), test_prob, test_y, c.quota, DeriveSeed(c.seed, "quadrants-test"));

  Append(kInitialTrained, {{"features", d.matrix.column_names()},
                           {"train_sample", train_sample.ToJson()},
                           {"test_sample", test_sample.ToJson()},
                           {"train_rows", d.train_rows.size()},
                           {"test_rows", d.test_rows.size()},
                           {"excluded", d.excluded}});
}

void Orchestrator::RecordLabel(const std::string& admission_id, const std::string& annotator,
                               bool label) {
  if (state_.status == Status::kInitializing) {
    throw ConflictError("labels are accepted once the labeling queue exists", "AwaitingLabels");
  }
  if (!state_.InQueue(admission_id)) {
    throw Error(ErrorCode::kQueue, "admission " + admission_id + " is not in the labeling queue");
  }
  if (annotator.empty()) throw Error(ErrorCode::kValidation, "annotator id is required");
  Append(kLabelRecorded, {{"admission_id", admission_id}, {"annotator", annotator},
                          {"label", label}});
}

QueueItem Orchestrator::MakeQueueItem(const std::string& admission_id) const {
  const RunData& d = *data_;
  const size_t row = d.Row(admission_id);
  QueueItem item;
  item.admission_id = admission_id;
  auto role = state_.roles.find(admission_id);
  if (role != state_.roles.end()) item.role = role->second;
  item.note_text = d.corpus[row].note_text;
  item.mentions = d.extractions[row].mentions;
  for (size_t c = 0; c < d.matrix.cols(); ++c) {
    if (d.matrix.kinds()[c] == features::ColumnKind::kStructured && !d.matrix.missing(row, c)) {
      item.structured[d.matrix.column_names()[c]] = d.matrix.at(row, c);
    }
  }
  auto gold = state_.gold.find(admission_id);
  if (gold != state_.gold.end()) item.labels = gold->second.labels;
  return item;
}

std::optional<QueueItem> Orchestrator::NextQueueItem(const std::string& annotator) const {
  for (const std::string& id : state_.queue) {
    const GoldLabel& g = state_.gold.at(id);
    if (g.consensus || g.labels.count(annotator)) continue;
    return MakeQueueItem(id);
  }
  return std::nullopt;
}

std::vector<shap::Explanation> Orchestrator::ExplainRows(const automl::TrainedClassifier& model,
                                                         const std::vector<size_t>& rows,
                                                         uint64_t seed,
                                                         Execution execution) const {
  const RunData& d = *data_;
  const LoopConfig& c = config();
  std::vector<size_t> background_rows;
  for (const std::string& id : state_.train_sample.Ordered()) background_rows.push_back(d.Row(id));
  const features::DenseMatrix background = shap::SelectBackground(
      model.Transform(d.matrix.SelectRows(background_rows)), c.shap_background,
      DeriveSeed(c.seed, "background"));
  const features::FeatureMatrix explained = d.matrix.SelectRows(rows);
  const automl::Classifier& clf = model.model();
  shap::ExplainOptions options;
  options.n_coalitions = c.shap_coalitions;
  options.seed = seed;
  options.execution = execution;
  return shap::ExplainRows([&clf](std::span<const double> x) { return clf.PredictProba(x); },
                           model.Transform(explained), explained.row_ids(),
                           model.feature_names(), background, options);
}

void Orchestrator::CheckCanIterate() const {
  if (state_.status == Status::kAwaitingVerdicts) {
    throw ConflictError("submit feature verdicts before the next iteration", "ReadyToTrain");
  }
  if (IsTerminal(state_.status)) {
    throw ConflictError("the run has finished iterating", "AwaitingLabels or ReadyToTrain");
  }
  RequireStatus({Status::kAwaitingLabels, Status::kReadyToTrain}, "iteration");
  const LoopConfig& c = config();
  const auto labels = state_.ConsensusLabels(QueueRole::kTrain);
  size_t pos = 0;
  for (const auto& entry : labels) pos += entry.second ? 1 : 0;
  const size_t neg = labels.size() - pos;
  if (pos < c.min_labels_per_class || neg < c.min_labels_per_class) {
    throw Error(ErrorCode::kInsufficientLabels,
                "need " + std::to_string(c.min_labels_per_class) +
                    " consensus labels per class; have " + std::to_string(pos) + " positive, " +
                    std::to_string(neg) + " negative");
  }
  if (state_.mask.empty()) throw Error(ErrorCode::kMask, "every feature has been removed");
}

void Orchestrator::Iterate(Execution execution) {
  CheckCanIterate();
  const LoopConfig& c = config();
  const RunData& d = *data_;
  const auto labels = state_.ConsensusLabels(QueueRole::kTrain);
  std::vector<size_t> rows;
  std::vector<int> y;
  for (const auto& [id, label] : labels) {
    rows.push_back(d.Row(id));
    y.push_back(label ? 1 : 0);
  }

  const int iteration = state_.iteration() + 1;
  const features::FeatureMatrix gold = d.matrix.SelectRows(rows);
  automl::SearchSpace space = c.Space(iteration);
  space.pipeline.execution = execution;
  automl::SearchResult result = automl::RunSearch(space, gold, y, state_.mask);
  const automl::TrainedClassifier& model = *result.model;

  const uint64_t shap_seed = DeriveSeed(c.seed, "shap-" + std::to_string(iteration));
  const shap::GlobalImportance importance =
      shap::ComputeGlobalImportance(ExplainRows(model, rows, shap_seed, execution));
  nlohmann::json ranked = nlohmann::json::array();
  for (const shap::FeatureImportance& f : importance.ranked) {
    ranked.push_back({{"feature", f.feature},
                      {"mean_abs_phi", f.mean_abs},
                      {"mean_phi", f.mean_phi},
                      {"direction", shap::DirectionName(f.direction)}});
  }
  nlohmann::json search = automl::SearchResultToJson(result);
  search.erase("history");
  search["trials"] = result.history.size();

  Append(kIterationCompleted, {{"iteration", iteration},
                               {"score", result.best_score},
                               {"mask", state_.mask},
                               {"best_config", result.best.ToJson()},
                               {"importance", ranked},
                               {"model", model.ToJson()},
                               {"search", search}});
}

void Orchestrator::RecordVerdicts(const std::string& reviewer,
                                  const std::map<std::string, synth::FeatureVerdict>& verdicts) {
  RequireStatus({Status::kAwaitingVerdicts, Status::kReadyToTrain}, "feature review");
  if (reviewer.empty()) throw Error(ErrorCode::kValidation, "reviewer id is required");
  nlohmann::json payload = nlohmann::json::object();
  for (const auto& [feature, verdict] : verdicts) {
    if (std::find(state_.all_features.begin(), state_.all_features.end(), feature) ==
        state_.all_features.end()) {
      throw Error(ErrorCode::kValidation, "unknown feature " + feature);
    }
    payload[feature] = synth::FeatureVerdictName(verdict);
  }
  Append(kVerdictsRecorded,
         {{"iteration", state_.iteration()}, {"reviewer", reviewer}, {"verdicts", payload}});
}

void Orchestrator::Reinstate(const std::string& feature, const std::string& reviewer) {
  RequireStatus({Status::kAwaitingLabels, Status::kAwaitingVerdicts, Status::kReadyToTrain},
                "reinstating a feature");
  if (std::find(state_.all_features.begin(), state_.all_features.end(), feature) ==
      state_.all_features.end()) {
    throw Error(ErrorCode::kValidation, "unknown feature " + feature);
  }
  if (std::find(state_.mask.begin(), state_.mask.end(), feature) != state_.mask.end()) {
    throw Error(ErrorCode::kValidation, "feature " + feature + " is already active");
  }
  Append(kFeatureReinstated, {{"feature", feature}, {"reviewer", reviewer}});
}

void Orchestrator::StartEstimate() {
  RequireStatus({Status::kConverged, Status::kMaxIterations}, "entire-set estimation");
  if (state_.estimate) throw ConflictError("the estimate sample already exists", "none");
  const RunData& d = *data_;
  const automl::TrainedClassifier model = CurrentModel();
  const features::FeatureMatrix test = d.matrix.SelectRows(d.test_rows);
  const std::vector<double> prob = model.PredictProba(test);
  const EstimateSample s = SampleForEstimate(test.row_ids(), prob, config().estimate_sample,
                                             DeriveSeed(config().seed, "estimate"));
  Append(kEstimateSampled, {{"n_pred", s.n_pred}, {"sample", s.sample}});
}

void Orchestrator::RecordFailure(const std::string& message) {
  Append(kJobFailed, {{"message", message}});
}

std::vector<RankedFeature> Orchestrator::TopFeatures(size_t m) const {
  if (state_.iterations.empty()) {
    throw ConflictError("no iteration has completed yet", "AwaitingVerdicts");
  }
  const auto& ranked = state_.iterations.back().importance;
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(std::min(m, ranked.size()))};
}

automl::TrainedClassifier Orchestrator::CurrentModel() const {
  if (state_.iterations.empty()) {
    throw ConflictError("no iteration has completed yet", "AwaitingVerdicts");
  }
  return automl::TrainedClassifier::FromJson(state_.iterations.back().model);
}

shap::Explanation Orchestrator::Explain(const std::string& admission_id) const {
  const size_t row = data_->Row(admission_id);
  const automl::TrainedClassifier model = CurrentModel();
  const uint64_t seed = DeriveSeed(config().seed, "explain-" + admission_id);
  return ExplainRows(model, {row}, seed, Execution::kSerial).front();
}

nlohmann::json Orchestrator::Metrics() const {
  nlohmann::json out;
  nlohmann::json scores = nlohmann::json::array();
  for (const IterationRecord& it : state_.iterations) {
    scores.push_back({{"iteration", it.iteration}, {"cv_auc_roc", it.score}});
  }
  out["status"] = StatusName(state_.status);
  out["iterations"] = scores;
  const auto labels = state_.ConsensusLabels(QueueRole::kTest);
  std::vector<int> y, icd;
  std::vector<size_t> rows;
  for (const auto& [id, label] : labels) {
    rows.push_back(data_->Row(id));
    y.push_back(label ? 1 : 0);
    icd.push_back(data_->IcdLabel(rows.back()));
  }
  out["gold_test_labeled"] = rows.size();
  if (!rows.empty()) {
    std::vector<metrics::ReportRow> table;
    table.push_back({"ICD", metrics::DiscreteReport(y, icd)});
    if (!state_.iterations.empty()) {
      const std::vector<double> prob =
          CurrentModel().PredictProba(data_->matrix.SelectRows(rows));
      const bool both = std::count(y.begin(), y.end(), 1) > 0 &&
                        std::count(y.begin(), y.end(), 0) > 0;
      metrics::MetricsReport model_report;
      if (both) {
        model_report = metrics::ScoreReport(y, prob);
      } else {
        model_report.confusion = metrics::ConfusionMetrics(y, prob);
      }
      table.push_back({"Workflow", model_report});
    }
    out["gold_test"] = metrics::ReportRowsToJson(table);
  }
  if (state_.estimate) {
    out["estimate"] = {{"n_pred", state_.estimate->n_pred},
                       {"sample_size", state_.estimate->sample.size()},
                       {"result", state_.estimate->result ? state_.estimate->result->ToJson()
                                                          : nlohmann::json()}};
  }
  return out;
}

}  // namespace phenoid::loop
