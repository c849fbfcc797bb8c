#ifndef PHENOID_SERVICE_RUNS_H_
#define PHENOID_SERVICE_RUNS_H_

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>

#include "json.hpp"
#include "phenoid/loop/orchestrator.h"

namespace phenoid::service {

struct ServiceOptions {
  std::filesystem::path data_dir;
  Execution execution = Execution::kParallel;
  // Run background jobs on the calling thread (deterministic tests).
  bool inline_jobs = false;
};

// Transport-independent run registry behind the HTTP endpoints. Every run
// lives in data_dir/runs/<id>/ as run.json (immutable descriptor) plus
// events.jsonl; restarting the service folds the logs back into memory.
class RunManager {
 public:
  explicit RunManager(ServiceOptions options);
  ~RunManager();
  RunManager(const RunManager&) = delete;
  RunManager& operator=(const RunManager&) = delete;

  // Request: {disease, corpus, config?, inclusion?, exclusion?, background?}.
  // `corpus` is a JSONL file or a directory containing corpus.jsonl.
  nlohmann::json CreateRun(const nlohmann::json& request);
  nlohmann::json GetRun(const std::string& run_id) const;
  nlohmann::json NextQueueItem(const std::string& run_id, const std::string& annotator) const;
  nlohmann::json PostLabel(const std::string& run_id, const nlohmann::json& body);
  nlohmann::json TopFeatures(const std::string& run_id, size_t m) const;
  nlohmann::json PostVerdicts(const std::string& run_id, const nlohmann::json& body);
  nlohmann::json Reinstate(const std::string& run_id, const nlohmann::json& body);
  nlohmann::json TriggerIterate(const std::string& run_id);
  nlohmann::json Metrics(const std::string& run_id) const;
  nlohmann::json Explanation(const std::string& run_id, const std::string& admission_id) const;

  // Current folded state (for tests and diagnostics).
  loop::LoopState State(const std::string& run_id) const;
  // Blocks until no job is queued or running.
  void WaitIdle();

 private:
  struct Run {
    std::string id;
    nlohmann::json descriptor;
    mutable std::shared_mutex mutex;
    std::optional<loop::Orchestrator> orch;
    bool busy = false;
  };

  std::shared_ptr<Run> Find(const std::string& run_id) const;
  void LoadExisting();
  void Enqueue(std::shared_ptr<Run> run, std::function<void(loop::Orchestrator&)> job);
  void WorkerLoop();
  nlohmann::json Describe(const Run& run) const;
  void RequireIdle(const Run& run) const;

  ServiceOptions options_;
  mutable std::mutex runs_mutex_;
  std::map<std::string, std::shared_ptr<Run>> runs_;

  std::mutex jobs_mutex_;
  std::condition_variable jobs_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::function<void()>> jobs_;
  bool job_running_ = false;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace phenoid::service

#endif  // PHENOID_SERVICE_RUNS_H_
