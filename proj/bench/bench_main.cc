// Serial reference vs OpenMP kernels. The range argument selects the
// execution mode: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "phenoid/automl/pipeline.h"
#include "phenoid/automl/search.h"
#include "phenoid/corpus/catalog.h"
#include "phenoid/features/matrix.h"
#include "phenoid/hpo/extractor.h"
#include "phenoid/shap/shapley.h"
#include "phenoid/synth/generator.h"
#include "phenoid/synth/profile.h"

namespace {

using namespace phenoid;

Execution Mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

struct Fixture {
  std::vector<corpus::EhrAdmission> corpus;
  features::FeatureMatrix matrix;
  std::vector<int> y;
};

const Fixture& Data() {
  static const Fixture f = [] {
    const auto extractor = hpo::LoadDefaultExtractor();
    const auto catalog = corpus::StructuredFeatureCatalog::Default();
    auto gen = synth::GenerateCorpus(synth::LoadShippedProfile("cachexia"), 600, 0.2, 1,
                                     extractor->matcher(), catalog);
    Fixture out;
    out.matrix = features::BuildMatrix(gen.admissions, *extractor, catalog).matrix;
    for (const auto& a : gen.admissions) out.y.push_back(gen.truth.Get(a.admission_id).true_label);
    out.corpus = std::move(gen.admissions);
    return out;
  }();
  return f;
}

automl::TrainedClassifier Forest(Execution execution) {
  automl::TrialConfig rf;
  rf.family = automl::Family::kRandomForest;
  rf.hyperparameters = {{"n_trees", 100}, {"max_depth", -1}};
  automl::PipelineOptions options;
  options.execution = execution;
  return automl::TrainedClassifier::Fit(Data().matrix, Data().y, rf, {}, 7, options);
}

void BM_BuildMatrix(benchmark::State& state) {
  const auto extractor = hpo::LoadDefaultExtractor();
  const auto catalog = corpus::StructuredFeatureCatalog::Default();
  features::BuildOptions options;
  options.execution = Mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(features::BuildMatrix(Data().corpus, *extractor, catalog, options));
  }
}

void BM_ForestFit(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(Forest(Mode(state)));
}

void BM_ExplainRows(benchmark::State& state) {
  const auto model = Forest(Execution::kParallel);
  const auto x = model.Transform(Data().matrix);
  const auto background = shap::SelectBackground(x, 50, 3);
  std::vector<size_t> idx;
  for (size_t i = 0; i < 16; ++i) idx.push_back(i);
  const features::DenseMatrix rows = model.Transform(Data().matrix.SelectRows(idx));
  std::vector<std::string> ids(idx.size(), "r");
  const automl::Classifier& clf = model.model();
  shap::ExplainOptions options;
  options.n_coalitions = 512;
  options.execution = Mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(shap::ExplainRows(
        [&clf](std::span<const double> r) { return clf.PredictProba(r); }, rows, ids,
        model.feature_names(), background, options));
  }
}

void BM_RunSearch(benchmark::State& state) {
  automl::SearchSpace space;
  space.families = {automl::Family::kLogisticRegression, automl::Family::kRandomForest};
  space.k_grid = {16, 0};
  space.folds = 3;
  space.budget_seconds = 600;
  space.seed = 5;
  space.pipeline.execution = Mode(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(automl::RunSearch(space, Data().matrix, Data().y));
  }
}

BENCHMARK(BM_BuildMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestFit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExplainRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
