#include "phenoid/service/runs.h"

#include <cstdio>
#include <random>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"
#include "phenoid/shap/importance.h"

namespace phenoid::service {

namespace fs = std::filesystem;

namespace {

std::string NewRunId() {
  std::random_device rd;
  const uint64_t v = (static_cast<uint64_t>(rd()) << 32) ^ rd();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run-%012llx",
                static_cast<unsigned long long>(v & 0xffffffffffffULL));
  return buf;
}

const std::string& RequireString(const nlohmann::json& body, const char* field) {
  if (!body.is_object() || !body.contains(field) || !body.at(field).is_string() ||
      body.at(field).get_ref<const std::string&>().empty()) {
    throw Error(ErrorCode::kValidation, std::string("field '") + field + "' is required");
  }
  return body.at(field).get_ref<const std::string&>();
}

const hpo::PhenotypeExtractor& SharedExtractor() {
  static const auto extractor = hpo::LoadDefaultExtractor();
  return *extractor;
}

std::shared_ptr<const loop::RunData> LoadRunData(const std::string& corpus_path,
                                                 const loop::LoopConfig& config,
                                                 Execution execution) {
  fs::path path = corpus_path;
  if (fs::is_directory(path)) path /= "corpus.jsonl";
  std::vector<corpus::EhrAdmission> admissions;
  try {
    admissions = corpus::ParseCorpusFile(path.string());
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, std::string("unreadable corpus: ") + e.what());
  }
  if (admissions.empty()) throw Error(ErrorCode::kValidation, "corpus is empty");
  return loop::PrepareRunData(std::move(admissions), config, SharedExtractor(),
                              corpus::StructuredFeatureCatalog::Default(), execution);
}

}  // namespace

RunManager::RunManager(ServiceOptions options) : options_(std::move(options)) {
  fs::create_directories(options_.data_dir / "runs");
  if (!options_.inline_jobs) worker_ = std::thread([this] { WorkerLoop(); });
  LoadExisting();
}

RunManager::~RunManager() {
  {
    std::lock_guard lock(jobs_mutex_);
    stopping_ = true;
  }
  jobs_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void RunManager::WorkerLoop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(jobs_mutex_);
      jobs_cv_.wait(lock, [&] { return stopping_ || !jobs_.empty(); });
      if (stopping_) return;
      job = std::move(jobs_.front());
      jobs_.pop_front();
      job_running_ = true;
    }
    job();
    {
      std::lock_guard lock(jobs_mutex_);
      job_running_ = false;
    }
    idle_cv_.notify_all();
  }
}

void RunManager::WaitIdle() {
  std::unique_lock lock(jobs_mutex_);
  idle_cv_.wait(lock, [&] { return jobs_.empty() && !job_running_; });
}

void RunManager::Enqueue(std::shared_ptr<Run> run,
                         std::function<void(loop::Orchestrator&)> job) {
  // The caller holds the run's exclusive lock and has set run->busy. Mutations
  // are refused while busy, so the job can work on a private copy and swap it
  // in at the end while readers keep using the old state.
  auto task = [run, job = std::move(job)] {
    std::optional<loop::Orchestrator> work;
    {
      std::shared_lock lock(run->mutex);
      work = *run->orch;
    }
    std::string failure;
    try {
      job(*work);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    std::unique_lock lock(run->mutex);
    if (failure.empty()) {
      run->orch = std::move(work);
    } else {
      run->orch->RecordFailure(failure);
    }
    run->busy = false;
  };
  if (options_.inline_jobs) {
    run->mutex.unlock();
    task();
    run->mutex.lock();
    return;
  }
  {
    std::lock_guard lock(jobs_mutex_);
    jobs_.push_back(std::move(task));
  }
  jobs_cv_.notify_one();
}

void RunManager::LoadExisting() {
  for (const auto& entry : fs::directory_iterator(options_.data_dir / "runs")) {
    const fs::path descriptor_file = entry.path() / "run.json";
    if (!entry.is_directory() || !fs::exists(descriptor_file)) continue;
    auto run = std::make_shared<Run>();
    run->descriptor = nlohmann::json::parse(ReadFile(descriptor_file));
    run->id = run->descriptor.at("run_id").get<std::string>();
    const loop::LoopConfig config = loop::LoopConfig::FromJson(run->descriptor.at("config"));
    auto data = LoadRunData(run->descriptor.at("corpus").get<std::string>(), config,
                            options_.execution);
    run->orch = loop::Orchestrator::Resume(
        data, loop::EventLog::Open(entry.path() / "events.jsonl"));
    runs_[run->id] = run;
    const loop::LoopState& s = run->orch->state();
    if (s.status == loop::Status::kInitializing && s.last_error.empty()) {
      std::unique_lock lock(run->mutex);
      run->busy = true;
      Enqueue(run, [exec = options_.execution](loop::Orchestrator& o) { o.TrainInitial(exec); });
    }
  }
}

std::shared_ptr<RunManager::Run> RunManager::Find(const std::string& run_id) const {
  std::lock_guard lock(runs_mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) throw Error(ErrorCode::kNotFound, "unknown run " + run_id);
  return it->second;
}

void RunManager::RequireIdle(const Run& run) const {
  if (run.busy) throw loop::ConflictError("a background job is running for this run", "idle");
}

nlohmann::json RunManager::Describe(const Run& run) const {
  nlohmann::json out = run.descriptor;
  const loop::LoopState& s = run.orch->state();
  size_t consensus = 0;
  for (const auto& [id, g] : s.gold) consensus += g.consensus ? 1 : 0;
  nlohmann::json scores = nlohmann::json::array();
  for (const auto& it : s.iterations) scores.push_back(it.score);
  out["status"] = loop::StatusName(s.status);
  out["busy"] = run.busy;
  out["iteration"] = s.iteration();
  out["scores"] = scores;
  out["queue_size"] = s.queue.size();
  out["consensus_labels"] = consensus;
  out["mask_size"] = s.mask.size();
  out["last_error"] = s.last_error;
  return out;
}

nlohmann::json RunManager::CreateRun(const nlohmann::json& request) {
  const std::string disease = RequireString(request, "disease");
  const std::string corpus_path = RequireString(request, "corpus");
  loop::LoopConfig config =
      loop::LoopConfig::FromJson(request.value("config", nlohmann::json::object()));
  config.disease = disease;
  config.inclusion = request.value("inclusion", config.inclusion);
  config.exclusion = request.value("exclusion", config.exclusion);
  config.background = request.value("background", config.background);
  config.Validate();
  auto data = LoadRunData(corpus_path, config, options_.execution);

  auto run = std::make_shared<Run>();
  {
    std::lock_guard lock(runs_mutex_);
    do {
      run->id = NewRunId();
    } while (runs_.count(run->id) || fs::exists(options_.data_dir / "runs" / run->id));
  }
  const fs::path dir = options_.data_dir / "runs" / run->id;
  fs::create_directories(dir);
  run->descriptor = {{"run_id", run->id},
                     {"schema_version", 1},
                     {"disease", disease},
                     {"corpus", fs::absolute(corpus_path).string()},
                     {"config", config.ToJson()},
                     {"created", loop::UtcTimestamp()}};
  WriteFileAtomic(dir / "run.json", run->descriptor.dump(2) + "\n");
  run->orch = loop::Orchestrator::Create(data, config, loop::EventLog(dir / "events.jsonl"));
  {
    std::lock_guard lock(runs_mutex_);
    runs_[run->id] = run;
  }
  std::unique_lock lock(run->mutex);
  run->busy = true;
  Enqueue(run, [exec = options_.execution](loop::Orchestrator& o) { o.TrainInitial(exec); });
  return Describe(*run);
}

nlohmann::json RunManager::GetRun(const std::string& run_id) const {
  auto run = Find(run_id);
  std::shared_lock lock(run->mutex);
  return Describe(*run);
}

nlohmann::json RunManager::NextQueueItem(const std::string& run_id,
                                         const std::string& annotator) const {
  if (annotator.empty()) throw Error(ErrorCode::kValidation, "annotator is required");
  auto run = Find(run_id);
  std::shared_lock lock(run->mutex);
  const loop::LoopState& s = run->orch->state();
  size_t done = 0;
  for (const std::string& id : s.queue) {
    const loop::GoldLabel& g = s.gold.at(id);
    done += (g.consensus || g.labels.count(annotator)) ? 1 : 0;
  }
  nlohmann::json out = {{"progress", {{"done", done}, {"total", s.queue.size()}}}};
  auto item = run->orch->NextQueueItem(annotator);
  out["empty"] = !item.has_value();
  out["item"] = item ? item->ToJson() : nlohmann::json();
  return out;
}

nlohmann::json RunManager::PostLabel(const std::string& run_id, const nlohmann::json& body) {
  const std::string admission = RequireString(body, "admission_id");
  const std::string annotator = RequireString(body, "annotator");
  if (!body.contains("label") || !body.at("label").is_boolean()) {
    throw Error(ErrorCode::kValidation, "field 'label' must be a boolean");
  }
  auto run = Find(run_id);
  std::unique_lock lock(run->mutex);
  RequireIdle(*run);
  run->orch->RecordLabel(admission, annotator, body.at("label").get<bool>());
  const loop::GoldLabel& g = run->orch->state().gold.at(admission);
  return {{"admission_id", admission},
          {"labels", g.labels},
          {"consensus", g.consensus ? nlohmann::json(*g.consensus) : nlohmann::json()}};
}

nlohmann::json RunManager::TopFeatures(const std::string& run_id, size_t m) const {
  auto run = Find(run_id);
  std::shared_lock lock(run->mutex);
  nlohmann::json features = nlohmann::json::array();
  for (const loop::RankedFeature& f : run->orch->TopFeatures(m)) {
    features.push_back({{"feature", f.feature},
                        {"mean_abs_phi", f.mean_abs_phi},
                        {"mean_phi", f.mean_phi},
                        {"direction", f.direction}});
  }
  return {{"iteration", run->orch->state().iteration()}, {"features", features}};
}

nlohmann::json RunManager::PostVerdicts(const std::string& run_id, const nlohmann::json& body) {
  const std::string reviewer = RequireString(body, "reviewer");
  if (!body.contains("verdicts") || !body.at("verdicts").is_object()) {
    throw Error(ErrorCode::kValidation, "field 'verdicts' must map features to verdicts");
  }
  std::map<std::string, synth::FeatureVerdict> verdicts;
  for (const auto& [feature, v] : body.at("verdicts").items()) {
    if (!v.is_string()) throw Error(ErrorCode::kValidation, "verdicts must be strings");
    try {
      verdicts[feature] = synth::ParseFeatureVerdict(v.get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, e.what());
    }
  }
  auto run = Find(run_id);
  std::unique_lock lock(run->mutex);
  RequireIdle(*run);
  run->orch->RecordVerdicts(reviewer, verdicts);
  return Describe(*run);
}

nlohmann::json RunManager::Reinstate(const std::string& run_id, const nlohmann::json& body) {
  const std::string feature = RequireString(body, "feature");
  const std::string reviewer = RequireString(body, "reviewer");
  auto run = Find(run_id);
  std::unique_lock lock(run->mutex);
  RequireIdle(*run);
  run->orch->Reinstate(feature, reviewer);
  return Describe(*run);
}

nlohmann::json RunManager::TriggerIterate(const std::string& run_id) {
  auto run = Find(run_id);
  std::unique_lock lock(run->mutex);
  RequireIdle(*run);
  try {
    run->orch->CheckCanIterate();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientLabels) throw;
    throw loop::ConflictError(e.what(), "AwaitingLabels with enough consensus labels");
  }
  run->busy = true;
  Enqueue(run, [exec = options_.execution](loop::Orchestrator& o) {
    o.Iterate(exec);
    if (loop::IsTerminal(o.state().status)) o.StartEstimate();
  });
  return Describe(*run);
}

nlohmann::json RunManager::Metrics(const std::string& run_id) const {
  auto run = Find(run_id);
  std::shared_lock lock(run->mutex);
  return run->orch->Metrics();
}

nlohmann::json RunManager::Explanation(const std::string& run_id,
                                       const std::string& admission_id) const {
  auto run = Find(run_id);
  std::optional<loop::Orchestrator> snapshot;
  {
    std::shared_lock lock(run->mutex);
    snapshot = *run->orch;
  }
  const shap::Explanation e = snapshot->Explain(admission_id);
  nlohmann::json out = shap::ExplanationToJson(e);
  out["iteration"] = snapshot->state().iteration();
  return out;
}

loop::LoopState RunManager::State(const std::string& run_id) const {
  auto run = Find(run_id);
  std::shared_lock lock(run->mutex);
  return run->orch->state();
}

}  // namespace phenoid::service
