#include "phenoid/loop/state.h"

#include <algorithm>
#include <cmath>

#include "phenoid/common/error.h"

namespace phenoid::loop {

std::string_view StatusName(Status s) {
  switch (s) {
    case Status::kInitializing: return "Initializing";
    case Status::kAwaitingLabels: return "AwaitingLabels";
    case Status::kAwaitingVerdicts: return "AwaitingVerdicts";
    case Status::kReadyToTrain: return "ReadyToTrain";
    case Status::kConverged: return "Converged";
    case Status::kMaxIterations: return "MaxIterations";
  }
  return "?";
}

bool IsTerminal(Status s) { return s == Status::kConverged || s == Status::kMaxIterations; }

std::string_view QueueRoleName(QueueRole r) {
  switch (r) {
    case QueueRole::kTrain: return "train";
    case QueueRole::kTest: return "test";
    case QueueRole::kEstimate: return "estimate";
  }
  return "?";
}

corpus::DiseaseCriteria LoopConfig::Criteria() const {
  if (inclusion.empty()) return corpus::CriteriaByName(disease);
  corpus::DiseaseCriteria c;
  c.disease = disease;
  try {
    c.inclusion = corpus::CodePredicate::Parse(inclusion);
    if (!exclusion.empty()) c.exclusion = corpus::CodePredicate::Parse(exclusion);
    if (!background.empty()) c.background = corpus::CodePredicate::Parse(background);
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, std::string("invalid custom criteria: ") + e.what());
  }
  return c;
}

automl::SearchSpace LoopConfig::Space(int iteration) const {
  automl::SearchSpace space;
  space.families.clear();
  for (const std::string& f : families) space.families.push_back(automl::ParseFamily(f));
  space.k_grid = k_grid;
  space.max_resource = max_resource;
  space.eta = eta;
  space.folds = folds;
  space.budget_seconds = budget_seconds;
  space.seed = DeriveSeed(seed, "search-" + std::to_string(iteration));
  return space;
}

void LoopConfig::Validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::kValidation, m); };
  if (disease.empty()) fail("disease name is required");
  Criteria();
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) fail("train_fraction must lie in (0, 1]");
  if (quota < 1) fail("quota must be >= 1");
  if (required_annotators < 1) fail("required_annotators must be >= 1");
  if (m_top < 1) fail("m_top must be >= 1");
  if (!(epsilon >= 0.0)) fail("epsilon must be >= 0");
  if (max_iterations < 1) fail("max_iterations must be >= 1");
  if (initial_trees < 1) fail("initial_trees must be >= 1");
  if (shap_background < 1) fail("shap_background must be >= 1");
  try {
    Space(0).Validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

nlohmann::json LoopConfig::ToJson() const {
  return {{"disease", disease},
          {"inclusion", inclusion},
          {"exclusion", exclusion},
          {"background", background},
          {"seed", seed},
          {"train_fraction", train_fraction},
          {"quota", quota},
          {"required_annotators", required_annotators},
          {"m_top", m_top},
          {"epsilon", epsilon},
          {"max_iterations", max_iterations},
          {"min_labels_per_class", min_labels_per_class},
          {"estimate_sample", estimate_sample},
          {"initial_trees", initial_trees},
          {"families", families},
          {"k_grid", k_grid},
          {"max_resource", max_resource},
          {"eta", eta},
          {"folds", folds},
          {"budget_seconds", budget_seconds},
          {"shap_background", shap_background},
          {"shap_coalitions", shap_coalitions}};
}

LoopConfig LoopConfig::FromJson(const nlohmann::json& j) {
  LoopConfig c;
  try {
    c.disease = j.value("disease", c.disease);
    c.inclusion = j.value("inclusion", c.inclusion);
    c.exclusion = j.value("exclusion", c.exclusion);
    c.background = j.value("background", c.background);
    c.seed = j.value("seed", c.seed);
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.quota = j.value("quota", c.quota);
    c.required_annotators = j.value("required_annotators", c.required_annotators);
    c.m_top = j.value("m_top", c.m_top);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.min_labels_per_class = j.value("min_labels_per_class", c.min_labels_per_class);
    c.estimate_sample = j.value("estimate_sample", c.estimate_sample);
    c.initial_trees = j.value("initial_trees", c.initial_trees);
    c.families = j.value("families", c.families);
    c.k_grid = j.value("k_grid", c.k_grid);
    c.max_resource = j.value("max_resource", c.max_resource);
    c.eta = j.value("eta", c.eta);
    c.folds = j.value("folds", c.folds);
    c.budget_seconds = j.value("budget_seconds", c.budget_seconds);
    c.shap_background = j.value("shap_background", c.shap_background);
    c.shap_coalitions = j.value("shap_coalitions", c.shap_coalitions);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("invalid run config: ") + e.what());
  }
  return c;
}

void GoldLabel::Recompute(int required) {
  consensus.reset();
  const size_t n = labels.size();
  if (n < static_cast<size_t>(required)) return;
  size_t yes = 0;
  for (const auto& [annotator, label] : labels) yes += label ? 1 : 0;
  if (2 * yes > n) consensus = true;
  if (2 * (n - yes) > n) consensus = false;
}

std::vector<std::pair<std::string, bool>> LoopState::ConsensusLabels(QueueRole role) const {
  std::vector<std::pair<std::string, bool>> out;
  for (const std::string& id : queue) {
    if (roles.at(id) != role) continue;
    const GoldLabel& g = gold.at(id);
    if (g.consensus) out.emplace_back(id, *g.consensus);
  }
  return out;
}

namespace {

nlohmann::json RankedToJson(const std::vector<RankedFeature>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const RankedFeature& f : v) {
    out.push_back({{"feature", f.feature},
                   {"mean_abs_phi", f.mean_abs_phi},
                   {"mean_phi", f.mean_phi},
                   {"direction", f.direction}});
  }
  return out;
}

std::vector<RankedFeature> RankedFromJson(const nlohmann::json& j) {
  std::vector<RankedFeature> out;
  for (const auto& f : j) {
    out.push_back({f.at("feature").get<std::string>(), f.at("mean_abs_phi").get<double>(),
                   f.at("mean_phi").get<double>(), f.at("direction").get<std::string>()});
  }
  return out;
}

void AddToQueue(LoopState& s, const std::string& id, QueueRole role) {
  if (s.roles.count(id)) return;
  s.queue.push_back(id);
  s.roles[id] = role;
  s.gold[id];
}

void UpdateEstimate(LoopState& s) {
  if (!s.estimate || s.estimate->result) return;
  if (s.estimate->n_pred == 0) {
    EvaluationEstimate e;
    e.warning = "no predicted positives in the evaluation set";
    s.estimate->result = e;
    return;
  }
  size_t yes = 0;
  for (const std::string& id : s.estimate->sample) {
    const GoldLabel& g = s.gold.at(id);
    if (!g.consensus) return;
    yes += *g.consensus ? 1 : 0;
  }
  s.estimate->result = MakeEstimate(
      s.estimate->n_pred,
      static_cast<double>(yes) / static_cast<double>(s.estimate->sample.size()));
}

Status AfterIteration(const LoopState& s) {
  const LoopConfig& c = *s.config;
  const size_t t = s.iterations.size();
  if (t >= 2 && std::abs(s.iterations[t - 1].score - s.iterations[t - 2].score) < c.epsilon) {
    return Status::kConverged;
  }
  if (t >= static_cast<size_t>(c.max_iterations)) return Status::kMaxIterations;
  return Status::kAwaitingVerdicts;
}

}  // namespace

nlohmann::json LoopState::ToJson() const {
  nlohmann::json gold_json = nlohmann::json::object();
  for (const auto& [id, g] : gold) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [a, l] : g.labels) labels[a] = l;
    gold_json[id] = {{"labels", labels},
                     {"consensus", g.consensus ? nlohmann::json(*g.consensus) : nlohmann::json()}};
  }
  nlohmann::json roles_json = nlohmann::json::object();
  for (const auto& [id, r] : roles) roles_json[id] = QueueRoleName(r);
  nlohmann::json verdicts_json = nlohmann::json::array();
  for (const VerdictEntry& v : verdicts) {
    verdicts_json.push_back({{"feature", v.feature},
                             {"verdict", v.relevant ? "Relevant" : "Irrelevant"},
                             {"iteration", v.iteration},
                             {"reviewer", v.reviewer}});
  }
  nlohmann::json iterations_json = nlohmann::json::array();
  for (const IterationRecord& it : iterations) {
    iterations_json.push_back({{"iteration", it.iteration},
                               {"score", it.score},
                               {"mask", it.mask},
                               {"best_config", it.best_config},
                               {"importance", RankedToJson(it.importance)},
                               {"model", it.model},
                               {"search", it.search}});
  }
  nlohmann::json j = {{"config", config ? config->ToJson() : nlohmann::json()},
                      {"status", StatusName(status)},
                      {"iteration", iteration()},
                      {"all_features", all_features},
                      {"mask", mask},
                      {"train_sample", train_sample.ToJson()},
                      {"test_sample", test_sample.ToJson()},
                      {"queue", queue},
                      {"roles", roles_json},
                      {"gold", gold_json},
                      {"verdicts", verdicts_json},
                      {"iterations", iterations_json},
                      {"last_error", last_error}};
  if (estimate) {
    j["estimate"] = {{"n_pred", estimate->n_pred},
                     {"sample", estimate->sample},
                     {"result", estimate->result ? estimate->result->ToJson() : nlohmann::json()}};
  }
  return j;
}

void ApplyEvent(LoopState& s, const Event& e) {
  const nlohmann::json& p = e.payload;
  try {
    if (e.type == kRunCreated) {
      s = LoopState{};
      s.config = LoopConfig::FromJson(p.at("config"));
    } else if (e.type == kInitialTrained) {
      s.all_features = p.at("features").get<std::vector<std::string>>();
      s.mask = s.all_features;
      s.train_sample = QuadrantSample::FromJson(p.at("train_sample"));
      s.test_sample = QuadrantSample::FromJson(p.at("test_sample"));
      for (const std::string& id : s.train_sample.Ordered()) AddToQueue(s, id, QueueRole::kTrain);
      for (const std::string& id : s.test_sample.Ordered()) AddToQueue(s, id, QueueRole::kTest);
      s.status = Status::kAwaitingLabels;
      s.last_error.clear();
    } else if (e.type == kLabelRecorded) {
      GoldLabel& g = s.gold.at(p.at("admission_id").get<std::string>());
      g.labels[p.at("annotator").get<std::string>()] = p.at("label").get<bool>();
      g.Recompute(s.config->required_annotators);
      UpdateEstimate(s);
    } else if (e.type == kIterationCompleted) {
      IterationRecord it;
      it.iteration = p.at("iteration").get<int>();
      it.score = p.at("score").get<double>();
      it.mask = p.at("mask").get<std::vector<std::string>>();
      it.best_config = p.at("best_config");
      it.importance = RankedFromJson(p.at("importance"));
      it.model = p.at("model");
      it.search = p.at("search");
      s.iterations.push_back(std::move(it));
      s.status = AfterIteration(s);
      s.last_error.clear();
    } else if (e.type == kVerdictsRecorded) {
      const int iteration = p.at("iteration").get<int>();
      const std::string reviewer = p.at("reviewer").get<std::string>();
      for (const auto& [feature, verdict] : p.at("verdicts").items()) {
        const bool relevant = verdict.get<std::string>() == "Relevant";
        s.verdicts.push_back({feature, relevant, iteration, reviewer});
        if (!relevant) std::erase(s.mask, feature);
      }
      if (!IsTerminal(s.status)) s.status = Status::kReadyToTrain;
    } else if (e.type == kFeatureReinstated) {
      const std::string feature = p.at("feature").get<std::string>();
      if (std::find(s.mask.begin(), s.mask.end(), feature) == s.mask.end()) {
        std::vector<std::string> mask;
        for (const std::string& f : s.all_features) {
          if (f == feature || std::find(s.mask.begin(), s.mask.end(), f) != s.mask.end()) {
            mask.push_back(f);
          }
        }
        s.mask = std::move(mask);
      }
      s.verdicts.push_back({feature, true, s.iteration(), p.at("reviewer").get<std::string>()});
    } else if (e.type == kEstimateSampled) {
      EstimateState est;
      est.n_pred = p.at("n_pred").get<size_t>();
      est.sample = p.at("sample").get<std::vector<std::string>>();
      for (const std::string& id : est.sample) AddToQueue(s, id, QueueRole::kEstimate);
      s.estimate = std::move(est);
      UpdateEstimate(s);
    } else if (e.type == kJobFailed) {
      s.last_error = p.at("message").get<std::string>();
    } else {
      throw Error(ErrorCode::kParse, "unknown event type: " + e.type);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kParse, "malformed " + e.type + " event: " + ex.what());
  } catch (const std::out_of_range& ex) {
    throw Error(ErrorCode::kParse, "event " + e.type + " references unknown data");
  }
}

LoopState FoldEvents(const std::vector<Event>& events) {
  LoopState s;
  for (const Event& e : events) ApplyEvent(s, e);
  return s;
}

}  // namespace phenoid::loop
