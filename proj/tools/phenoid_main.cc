// Batch entry points for every pipeline stage plus the simulated-clinician
// loop and the HTTP service. Exit codes: 0 success, 1 bad input, 2 internal.

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "labels.h"
#include "phenoid/automl/search.h"
#include "phenoid/common/error.h"
#include "phenoid/common/io.h"
#include "phenoid/features/matrix.h"
#include "phenoid/hpo/extractor.h"
#include "phenoid/loop/simulation.h"
#include "phenoid/metrics/report.h"
#include "phenoid/service/http.h"
#include "phenoid/shap/importance.h"
#include "phenoid/synth/generator.h"

namespace fs = std::filesystem;
using namespace phenoid;

namespace {

struct Globals {
  bool json = false;
  bool serial = false;
  Execution execution() const { return serial ? Execution::kSerial : Execution::kParallel; }
};

void RequireFile(const std::string& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kValidation, "no such file: " + path);
}

synth::DiseaseProfile ResolveProfile(const std::string& arg) {
  if (fs::exists(arg)) return synth::LoadProfile(arg);
  return synth::LoadShippedProfile(arg);
}

features::FeatureMatrix LoadMatrix(const std::string& path) {
  RequireFile(path);
  return features::FeatureMatrix::FromCsv(ReadFile(path));
}

std::vector<int> LoadAlignedLabels(const std::string& path, const features::FeatureMatrix& m) {
  RequireFile(path);
  return tools::AlignLabels(m, tools::ParseLabels(ReadFile(path)));
}

// --- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string profile;
  int n = 2000;
  double prevalence = 0.03;
  uint64_t seed = 0;
  std::string out;
};

int RunSynth(const SynthArgs& a, const Globals& g) {
  const synth::DiseaseProfile profile = ResolveProfile(a.profile);
  const auto extractor = hpo::LoadDefaultExtractor();
  synth::GeneratedCorpus gen =
      synth::GenerateCorpus(profile, a.n, a.prevalence, a.seed, extractor->matcher(),
                            corpus::StructuredFeatureCatalog::Default());
  std::map<std::string, int> labels;
  for (const auto& [id, rec] : gen.truth.records) labels[id] = rec.true_label ? 1 : 0;
  loop::SimulationInput input{std::move(gen.admissions), std::move(gen.truth), profile};
  loop::WriteSimulationInput(a.out, input);
  WriteFileAtomic(fs::path(a.out) / "labels.csv", tools::SerializeLabels(labels));
  size_t positives = 0;
  for (const auto& [id, y] : labels) positives += y;
  if (g.json) {
    std::cout << nlohmann::json{{"out", a.out},
                                {"admissions", input.corpus.size()},
                                {"positives", positives}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "wrote " << input.corpus.size() << " admissions (" << positives
              << " positive) to " << a.out << "\n";
  }
  return 0;
}

// --- extract -------------------------------------------------------------

struct ExtractArgs {
  std::string corpus;
  std::string ontology;
  std::string lexicon;
  std::string out;
};

int RunExtract(const ExtractArgs& a, const Globals& g) {
  fs::path corpus_path = a.corpus;
  if (fs::is_directory(corpus_path)) corpus_path /= "corpus.jsonl";
  RequireFile(corpus_path.string());
  const std::string ontology_path = a.ontology.empty() ? DataPath("hpo_subset.obo").string()
                                                       : a.ontology;
  const std::string lexicon_path = a.lexicon.empty() ? DataPath("lexicon.tsv").string()
                                                     : a.lexicon;
  RequireFile(ontology_path);
  RequireFile(lexicon_path);
  auto ontology = std::make_shared<const hpo::Ontology>(hpo::Ontology::ParseFile(ontology_path));
  const hpo::LexiconExtractor extractor(ontology, hpo::ParseLexiconFile(lexicon_path));
  const auto admissions = corpus::ParseCorpusFile(corpus_path.string());
  features::BuildOptions options;
  options.execution = g.execution();
  const features::BuiltMatrix built = features::BuildMatrix(
      admissions, extractor, corpus::StructuredFeatureCatalog::Default(), options);
  WriteFileAtomic(a.out, built.matrix.ToCsv());
  if (g.json) {
    std::cout << nlohmann::json{{"out", a.out},
                                {"rows", built.matrix.rows()},
                                {"columns", built.matrix.cols()},
                                {"rejected_observations", built.rejected_observations}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "wrote " << built.matrix.rows() << " x " << built.matrix.cols() << " matrix to "
              << a.out << " (" << built.rejected_observations << " observations rejected)\n";
  }
  return 0;
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  std::string matrix;
  std::string labels;
  double budget = 120.0;
  uint64_t seed = 0;
  std::string out;
  int folds = 5;
  int max_resource = 9;
};

int RunTrain(const TrainArgs& a, const Globals& g) {
  const features::FeatureMatrix m = LoadMatrix(a.matrix);
  const std::vector<int> y = LoadAlignedLabels(a.labels, m);
  automl::SearchSpace space;
  space.budget_seconds = a.budget;
  space.seed = a.seed;
  space.folds = a.folds;
  space.max_resource = a.max_resource;
  space.pipeline.execution = g.execution();
  const automl::SearchResult result = automl::RunSearch(space, m, y);
  result.model->Save(a.out);
  if (g.json) {
    nlohmann::json j = automl::SearchResultToJson(result);
    j["model_path"] = a.out;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << automl::FormatSearchReport(result) << "model written to " << a.out << "\n";
  }
  return 0;
}

// --- evaluate ------------------------------------------------------------

struct EvaluateArgs {
  std::string model;
  std::string matrix;
  std::string labels;
  double threshold = 0.5;
};

int RunEvaluate(const EvaluateArgs& a, const Globals& g) {
  RequireFile(a.model);
  const automl::TrainedClassifier model = automl::TrainedClassifier::Load(a.model);
  const features::FeatureMatrix m = LoadMatrix(a.matrix);
  const std::vector<int> y = LoadAlignedLabels(a.labels, m);
  const std::vector<double> p = model.PredictProba(m);
  const std::vector<metrics::ReportRow> rows = {
      {std::string(automl::FamilyName(model.config().family)), metrics::ScoreReport(y, p, a.threshold)}};
  if (g.json) {
    std::cout << metrics::ReportRowsToJson(rows).dump(2) << "\n";
  } else {
    std::cout << metrics::FormatReportTable(rows);
  }
  return 0;
}

// --- explain -------------------------------------------------------------

struct ExplainArgs {
  std::string model;
  std::string matrix;
  std::string rows;
  std::string out;
  size_t background = 100;
  size_t coalitions = 0;
  uint64_t seed = 0;
};

int RunExplain(const ExplainArgs& a, const Globals& g) {
  RequireFile(a.model);
  const automl::TrainedClassifier model = automl::TrainedClassifier::Load(a.model);
  const features::FeatureMatrix m = LoadMatrix(a.matrix);
  std::vector<size_t> row_index;
  for (std::string_view id : Split(a.rows, ',')) {
    id = Trim(id);
    if (id.empty()) continue;
    auto r = m.RowIndex(id);
    if (!r) throw Error(ErrorCode::kNotFound, "admission " + std::string(id) + " not in matrix");
    row_index.push_back(*r);
  }
  if (row_index.empty()) throw Error(ErrorCode::kValidation, "--rows names no admissions");
  const features::FeatureMatrix explained = m.SelectRows(row_index);
  const features::DenseMatrix background =
      shap::SelectBackground(model.Transform(m), a.background, DeriveSeed(a.seed, "background"));
  shap::ExplainOptions options;
  options.n_coalitions = a.coalitions;
  options.seed = a.seed;
  options.execution = g.execution();
  const automl::Classifier& clf = model.model();
  const std::vector<shap::Explanation> explanations = shap::ExplainRows(
      [&clf](std::span<const double> x) { return clf.PredictProba(x); },
      model.Transform(explained), explained.row_ids(), model.feature_names(), background,
      options);

  const fs::path out = a.out;
  fs::create_directories(out);
  WriteFileAtomic(out / "beeswarm.csv", shap::ExportBeeswarm(explanations, explained));
  nlohmann::json all = nlohmann::json::array();
  for (const shap::Explanation& e : explanations) {
    WriteFileAtomic(out / ("waterfall_" + e.admission_id + ".csv"), shap::ExportWaterfall(e));
    all.push_back(shap::ExplanationToJson(e));
  }
  const shap::GlobalImportance importance = shap::ComputeGlobalImportance(explanations);
  WriteFileAtomic(out / "importance.json", importance.ToJson().dump(2) + "\n");
  WriteFileAtomic(out / "explanations.json", all.dump(2) + "\n");
  if (g.json) {
    std::cout << nlohmann::json{{"out", a.out}, {"importance", importance.ToJson()}}.dump(2)
              << "\n";
  } else {
    std::cout << "explained " << explanations.size() << " admissions into " << a.out << "\n";
    for (const std::string& f : importance.TopFeatures(10)) std::cout << "  " << f << "\n";
  }
  return 0;
}

// --- loop ----------------------------------------------------------------

struct LoopArgs {
  std::string corpus;
  std::string disease;
  bool oracle = false;
  uint64_t seed = 0;
  double budget = 120.0;
  double noise = 0.0;
  bool baselines = true;
  std::string events;
  std::string report;
};

int RunLoop(const LoopArgs& a, const Globals& g) {
  if (!a.oracle) {
    throw Error(ErrorCode::kValidation,
                "loop runs only with --oracle; use `serve` for human annotators");
  }
  if (!fs::is_directory(a.corpus)) {
    throw Error(ErrorCode::kValidation, "--corpus must be a directory written by `synth`");
  }
  const loop::SimulationInput input = loop::LoadSimulationInput(a.corpus);
  loop::LoopConfig config;
  config.disease = a.disease.empty() ? input.profile.disease : a.disease;
  config.seed = a.seed;
  config.budget_seconds = a.budget;
  config.required_annotators = 1;
  config.Validate();
  loop::SimulationOptions options;
  options.execution = g.execution();
  options.oracle_noise = a.noise;
  options.run_baselines = a.baselines;
  if (!a.events.empty()) options.event_log = a.events;
  if (!g.json) options.progress = [](const std::string& msg) { std::cerr << msg << "\n"; };
  const loop::SimulationReport report = loop::RunSimulation(input, config, options);
  if (!a.report.empty()) WriteFileAtomic(a.report, report.ToJson().dump(2) + "\n");
  if (g.json) {
    std::cout << report.ToJson().dump(2) << "\n";
  } else {
    std::cout << report.Format();
  }
  return 0;
}

// --- serve ---------------------------------------------------------------

struct ServeArgs {
  std::string addr = "127.0.0.1:8080";
  std::string data = "phenoid-data";
};

int RunServe(const ServeArgs& a, const Globals& g) {
  const size_t colon = a.addr.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kValidation, "--addr must be HOST:PORT");
  int port = 0;
  try {
    port = std::stoi(a.addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kValidation, "bad port in --addr " + a.addr);
  }
  service::ServiceOptions options;
  options.data_dir = a.data;
  options.execution = g.execution();
  service::RunManager runs(options);
  service::Api api(runs, options.data_dir);
  std::cerr << "serving on " << a.addr << " with data in " << a.data << "\n";
  service::Serve(api, a.addr.substr(0, colon), port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patient identification workbench"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable output on stdout");
  app.add_flag("--serial", g.serial, "Disable OpenMP parallel kernels");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth->add_option("--profile", synth_args.profile, "Profile JSON or shipped disease name")
      ->required();
  synth->add_option("--n", synth_args.n, "Number of admissions")->check(CLI::PositiveNumber);
  synth->add_option("--prevalence", synth_args.prevalence)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", synth_args.seed);
  synth->add_option("--out", synth_args.out, "Output directory")->required();

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand("extract", "Build the feature matrix CSV");
  extract->add_option("--corpus", extract_args.corpus, "corpus.jsonl or a synth directory")
      ->required();
  extract->add_option("--ontology", extract_args.ontology, "OBO file (default: shipped subset)");
  extract->add_option("--lexicon", extract_args.lexicon, "Synonym TSV (default: shipped)");
  extract->add_option("--out", extract_args.out, "Matrix CSV path")->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Hyperband search and final model fit");
  train->add_option("--matrix", train_args.matrix)->required();
  train->add_option("--labels", train_args.labels, "CSV admission_id,label")->required();
  train->add_option("--budget", train_args.budget, "Wall-clock budget in seconds");
  train->add_option("--seed", train_args.seed);
  train->add_option("--folds", train_args.folds);
  train->add_option("--max-resource", train_args.max_resource);
  train->add_option("--out", train_args.out, "Model JSON path")->required();

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "Score a model against labels");
  evaluate->add_option("--model", evaluate_args.model)->required();
  evaluate->add_option("--matrix", evaluate_args.matrix)->required();
  evaluate->add_option("--labels", evaluate_args.labels)->required();
  evaluate->add_option("--threshold", evaluate_args.threshold)->check(CLI::Range(0.0, 1.0));

  ExplainArgs explain_args;
  auto* explain = app.add_subcommand("explain", "SHAP beeswarm and waterfall exports");
  explain->add_option("--model", explain_args.model)->required();
  explain->add_option("--matrix", explain_args.matrix)->required();
  explain->add_option("--rows", explain_args.rows, "Comma-separated admission ids")->required();
  explain->add_option("--out", explain_args.out, "Output directory")->required();
  explain->add_option("--background", explain_args.background)->check(CLI::PositiveNumber);
  explain->add_option("--coalitions", explain_args.coalitions);
  explain->add_option("--seed", explain_args.seed);

  LoopArgs loop_args;
  auto* loop_cmd = app.add_subcommand("loop", "Run the whole loop with a simulated clinician");
  loop_cmd->add_option("--corpus", loop_args.corpus, "Directory written by synth")->required();
  loop_cmd->add_option("--disease", loop_args.disease);
  loop_cmd->add_flag("--oracle", loop_args.oracle, "Answer with the simulated clinician");
  loop_cmd->add_option("--seed", loop_args.seed);
  loop_cmd->add_option("--budget", loop_args.budget, "Search budget per iteration (seconds)");
  loop_cmd->add_option("--noise", loop_args.noise, "Oracle label flip rate")
      ->check(CLI::Range(0.0, 0.5));
  loop_cmd->add_flag("!--no-baselines", loop_args.baselines);
  loop_cmd->add_option("--events", loop_args.events, "Mirror the event log to this file");
  loop_cmd->add_option("--report", loop_args.report, "Write the JSON report here");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--addr", serve_args.addr, "HOST:PORT");
  serve->add_option("--data", serve_args.data, "Data directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) return RunSynth(synth_args, g);
    if (*extract) return RunExtract(extract_args, g);
    if (*train) return RunTrain(train_args, g);
    if (*evaluate) return RunEvaluate(evaluate_args, g);
    if (*explain) return RunExplain(explain_args, g);
    if (*loop_cmd) return RunLoop(loop_args, g);
    if (*serve) return RunServe(serve_args, g);
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return IsValidationError(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
