#ifndef PHENOID_LOOP_SIMULATION_H_
#define PHENOID_LOOP_SIMULATION_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phenoid/loop/orchestrator.h"
#include "phenoid/metrics/report.h"
#include "phenoid/synth/generator.h"
#include "phenoid/synth/profile.h"

namespace phenoid::loop {

struct SimulationInput {
  std::vector<corpus::EhrAdmission> corpus;
  synth::GroundTruth truth;
  synth::DiseaseProfile profile;
};

// Reads corpus.jsonl, truth.jsonl and profile.json as written by `synth`.
SimulationInput LoadSimulationInput(const std::filesystem::path& dir);
void WriteSimulationInput(const std::filesystem::path& dir, const SimulationInput& input);

struct SimulationOptions {
  Execution execution = Execution::kParallel;
  bool run_baselines = true;
  double oracle_noise = 0.0;
  std::optional<std::filesystem::path> event_log;  // mirror events to this file
  std::function<void(const std::string&)> progress;
};

struct IterationSummary {
  int iteration = 0;
  double score = 0.0;
  size_t mask_size = 0;
  std::string best_config;
  std::vector<std::string> top_features;  // first m_top by importance
  std::vector<std::string> removed;       // oracle verdicts Irrelevant after it
};

struct SimulationReport {
  std::string status;
  std::vector<IterationSummary> iterations;
  std::vector<metrics::ReportRow> gold_test;  // ICD, baselines, Workflow
  EvaluationEstimate estimate;
  std::vector<std::string> final_mask;
  std::vector<std::string> final_top10;
  std::vector<std::string> rejected;  // every feature the oracle marked Irrelevant
  size_t gold_train = 0;
  size_t gold_test_size = 0;
  double seconds = 0.0;

  const metrics::ReportRow* Row(const std::string& method) const;
  nlohmann::json ToJson() const;
  std::string Format() const;
};

inline constexpr const char* kIcdRow = "ICD";
inline constexpr const char* kStructuredOnlyRow = "Structured Only";
inline constexpr const char* kNaiveLexiconRow = "Structured + Lexicon (no negation)";
inline constexpr const char* kWorkflowRow = "Workflow";

// Drives the whole protocol with a simulated clinician: labels every queued
// admission, judges the top features after each iteration, reviews the
// estimate sample, and scores the final model and baselines on the gold test
// subset. `config.required_annotators` should be 1.
SimulationReport RunSimulation(const SimulationInput& input, const LoopConfig& config,
                               const SimulationOptions& options = {});

}  // namespace phenoid::loop

#endif  // PHENOID_LOOP_SIMULATION_H_
