#include "phenoid/loop/simulation.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"
#include "phenoid/common/rng.h"
#include "phenoid/synth/oracle.h"

namespace phenoid::loop {

namespace fs = std::filesystem;

SimulationInput LoadSimulationInput(const fs::path& dir) {
  SimulationInput in;
  in.corpus = corpus::ParseCorpusFile((dir / "corpus.jsonl").string());
  in.truth = synth::ParseGroundTruth(ReadFile(dir / "truth.jsonl"));
  in.profile = synth::LoadProfile((dir / "profile.json").string());
  return in;
}

void WriteSimulationInput(const fs::path& dir, const SimulationInput& input) {
  fs::create_directories(dir);
  WriteFileAtomic(dir / "corpus.jsonl", corpus::SerializeCorpus(input.corpus));
  WriteFileAtomic(dir / "truth.jsonl", synth::SerializeGroundTruth(input.truth));
  WriteFileAtomic(dir / "profile.json", synth::SerializeProfile(input.profile));
}

const metrics::ReportRow* SimulationReport::Row(const std::string& method) const {
  for (const metrics::ReportRow& r : gold_test) {
    if (r.method == method) return &r;
  }
  return nullptr;
}

nlohmann::json SimulationReport::ToJson() const {
  nlohmann::json its = nlohmann::json::array();
  for (const IterationSummary& it : iterations) {
    its.push_back({{"iteration", it.iteration},
                   {"cv_auc_roc", it.score},
                   {"mask_size", it.mask_size},
                   {"best_config", it.best_config},
                   {"top_features", it.top_features},
                   {"removed", it.removed}});
  }
  return {{"status", status},
          {"iterations", its},
          {"gold_test", metrics::ReportRowsToJson(gold_test)},
          {"estimate", estimate.ToJson()},
          {"final_mask", final_mask},
          {"final_top10", final_top10},
          {"rejected", rejected},
          {"gold_train", gold_train},
          {"gold_test_size", gold_test_size},
          {"seconds", seconds}};
}

std::string SimulationReport::Format() const {
  std::ostringstream out;
  char buf[64];
  for (const IterationSummary& it : iterations) {
    std::snprintf(buf, sizeof(buf), "%.4f", it.score);
    out << "iteration " << it.iteration << ": cv_auc_roc=" << buf << " features=" << it.mask_size
        << " best=" << it.best_config << '\n';
    if (!it.removed.empty()) {
      out << "  removed after review:";
      for (const std::string& f : it.removed) out << ' ' << f;
      out << '\n';
    }
  }
  out << "status: " << status << '\n';
  out << "final top-10:";
  for (const std::string& f : final_top10) out << ' ' << f;
  out << "\n\ngold test subset (" << gold_test_size << " admissions, " << gold_train
      << " gold training labels)\n";
  out << metrics::FormatReportTable(gold_test);
  std::snprintf(buf, sizeof(buf), "%.3f", estimate.p_est);
  out << "\nentire test set: N_pred=" << estimate.n_pred << " P_est=" << buf
      << " estimate=" << estimate.estimate;
  if (!estimate.warning.empty()) out << " (" << estimate.warning << ")";
  out << '\n';
  return out.str();
}

namespace {

std::vector<int> Labels(const std::vector<std::pair<std::string, bool>>& labels) {
  std::vector<int> y;
  for (const auto& [id, l] : labels) y.push_back(l ? 1 : 0);
  return y;
}

metrics::MetricsReport Evaluate(std::span<const int> y, std::span<const double> prob) {
  const bool both = std::count(y.begin(), y.end(), 1) > 0 && std::count(y.begin(), y.end(), 0) > 0;
  if (both) return metrics::ScoreReport(y, prob);
  metrics::MetricsReport r;
  r.confusion = metrics::ConfusionMetrics(y, prob);
  return r;
}

}  // namespace

SimulationReport RunSimulation(const SimulationInput& input, const LoopConfig& config,
                               const SimulationOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto say = [&](const std::string& msg) {
    if (options.progress) options.progress(msg);
  };
  const synth::SimulatedClinician oracle(input.truth, input.profile, options.oracle_noise,
                                         DeriveSeed(config.seed, "oracle"));
  const auto extractor = hpo::LoadDefaultExtractor();
  const auto catalog = corpus::StructuredFeatureCatalog::Default();
  auto data = PrepareRunData(input.corpus, config, *extractor, catalog, options.execution);
  EventLog log = options.event_log ? EventLog(*options.event_log) : EventLog();
  Orchestrator orch = Orchestrator::Create(data, config, std::move(log));

  say("training initial classifier on ICD labels");
  orch.TrainInitial(options.execution);
  auto label_queue = [&] {
    for (const std::string& id : orch.state().queue) {
      if (!orch.state().gold.at(id).consensus) orch.RecordLabel(id, "oracle", oracle.Diagnose(id));
    }
  };
  label_queue();

  SimulationReport report;
  std::set<std::string> rejected;
  while (!IsTerminal(orch.state().status)) {
    orch.Iterate(options.execution);
    const IterationRecord& rec = orch.state().iterations.back();
    IterationSummary summary;
    summary.iteration = rec.iteration;
    summary.score = rec.score;
    summary.mask_size = rec.mask.size();
    summary.best_config = automl::TrialConfig::FromJson(rec.best_config).Describe();
    for (const RankedFeature& f : orch.TopFeatures(config.m_top)) {
      summary.top_features.push_back(f.feature);
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", rec.score);
    say("iteration " + std::to_string(rec.iteration) + ": cv_auc_roc=" + buf);
    if (!IsTerminal(orch.state().status)) {
      std::map<std::string, synth::FeatureVerdict> verdicts;
      for (const std::string& f : summary.top_features) {
        verdicts[f] = oracle.JudgeFeature(f);
        if (verdicts[f] == synth::FeatureVerdict::kIrrelevant) {
          summary.removed.push_back(f);
          rejected.insert(f);
        }
      }
      orch.RecordVerdicts("oracle", verdicts);
    }
    report.iterations.push_back(std::move(summary));
  }
  report.status = std::string(StatusName(orch.state().status));

  say("estimating true positives on the entire test set");
  orch.StartEstimate();
  label_queue();
  if (orch.state().estimate && orch.state().estimate->result) {
    report.estimate = *orch.state().estimate->result;
  }

  const automl::TrainedClassifier model = orch.CurrentModel();
  report.final_mask = orch.state().mask;
  for (const RankedFeature& f : orch.TopFeatures(10)) report.final_top10.push_back(f.feature);
  report.rejected.assign(rejected.begin(), rejected.end());

  const auto train_labels = orch.state().ConsensusLabels(QueueRole::kTrain);
  const auto test_labels = orch.state().ConsensusLabels(QueueRole::kTest);
  report.gold_train = train_labels.size();
  report.gold_test_size = test_labels.size();
  std::vector<size_t> train_rows, test_rows;
  for (const auto& [id, l] : train_labels) train_rows.push_back(data->Row(id));
  for (const auto& [id, l] : test_labels) test_rows.push_back(data->Row(id));
  const std::vector<int> y_train = Labels(train_labels);
  const std::vector<int> y_test = Labels(test_labels);

  std::vector<int> icd;
  for (size_t r : test_rows) icd.push_back(data->IcdLabel(r));
  report.gold_test.push_back({kIcdRow, metrics::DiscreteReport(y_test, icd)});

  if (options.run_baselines) {
    say("baseline: structured features only");
    std::vector<std::string> structured;
    for (size_t c = 0; c < data->matrix.cols(); ++c) {
      if (data->matrix.kinds()[c] == features::ColumnKind::kStructured) {
        structured.push_back(data->matrix.column_names()[c]);
      }
    }
    automl::SearchSpace space = config.Space(100);
    space.pipeline.execution = options.execution;
    const features::FeatureMatrix gold_train = data->matrix.SelectRows(train_rows);
    const features::FeatureMatrix gold_test = data->matrix.SelectRows(test_rows);
    auto structured_result = automl::RunSearch(space, gold_train, y_train, structured);
    const auto structured_prob = structured_result.model->PredictProba(gold_test);
    report.gold_test.push_back({kStructuredOnlyRow, Evaluate(y_test, structured_prob)});

    say("baseline: structured features plus a lexicon matcher without negation handling");
    hpo::LexiconExtractorOptions naive_options;
    naive_options.negation_cues.clear();
    const auto naive = hpo::LoadDefaultExtractor(naive_options);
    std::vector<corpus::EhrAdmission> subset;
    for (size_t r : train_rows) subset.push_back(data->corpus[r]);
    for (size_t r : test_rows) subset.push_back(data->corpus[r]);
    features::BuildOptions build;
    build.execution = options.execution;
    const features::FeatureMatrix naive_all =
        features::BuildMatrix(subset, *naive, catalog, build).matrix;
    std::vector<size_t> naive_train(train_rows.size()), naive_test(test_rows.size());
    for (size_t i = 0; i < naive_train.size(); ++i) naive_train[i] = i;
    for (size_t i = 0; i < naive_test.size(); ++i) naive_test[i] = train_rows.size() + i;
    space.seed = DeriveSeed(config.seed, "baseline-lexicon");
    auto naive_result =
        automl::RunSearch(space, naive_all.SelectRows(naive_train), y_train);
    const auto naive_prob = naive_result.model->PredictProba(naive_all.SelectRows(naive_test));
    report.gold_test.push_back({kNaiveLexiconRow, Evaluate(y_test, naive_prob)});
  }

  const auto workflow_prob = model.PredictProba(data->matrix.SelectRows(test_rows));
  report.gold_test.push_back({kWorkflowRow, Evaluate(y_test, workflow_prob)});
  report.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

}  // namespace phenoid::loop
