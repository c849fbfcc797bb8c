#include <gtest/gtest.h>

#include "phenoid/common/error.h"
#include "phenoid/loop/simulation.h"
#include "phenoid/service/http.h"
#include "phenoid/service/runs.h"
#include "phenoid/synth/profile.h"
#include "testing.h"

namespace phenoid::service {
namespace {

nlohmann::json SmallConfig() {
  return {{"seed", 3},          {"quota", 10},          {"required_annotators", 1},
          {"min_labels_per_class", 5}, {"initial_trees", 30},
          {"families", {"LogisticRegression"}}, {"k_grid", {8, 0}},
          {"folds", 3},         {"max_resource", 3},    {"shap_background", 20},
          {"max_iterations", 2}, {"estimate_sample", 10}};
}

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_dir_ = new std::filesystem::path(testing::TempDir("svc-corpus"));
    generated_ = new synth::GeneratedCorpus(testing::CachexiaCorpus(300, 0.15, 9));
    loop::WriteSimulationInput(*corpus_dir_, {generated_->admissions, generated_->truth,
                                              synth::LoadShippedProfile("cachexia")});
  }
  static void TearDownTestSuite() {
    delete corpus_dir_;
    delete generated_;
  }

  void SetUp() override {
    data_dir_ = testing::TempDir("svc-data");
    Start();
  }

  void Start() {
    api_.reset();
    runs_.reset();
    runs_ = std::make_unique<RunManager>(
        ServiceOptions{data_dir_, Execution::kParallel, /*inline_jobs=*/true});
    api_ = std::make_unique<Api>(*runs_, data_dir_);
  }

  ApiResponse Call(const std::string& method, const std::string& path,
                   const nlohmann::json& body = nullptr,
                   std::map<std::string, std::string> query = {}, const std::string& key = "") {
    ApiRequest r;
    r.method = method;
    r.path = path;
    r.query = std::move(query);
    if (!body.is_null()) r.body = body.dump();
    r.idempotency_key = key;
    return api_->Handle(r);
  }

  std::string CreateRun() {
    const ApiResponse r = Call("POST", "/runs",
                               {{"disease", "Cancer Cachexia"},
                                {"corpus", corpus_dir_->string()},
                                {"config", SmallConfig()}});
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body.at("run_id");
  }

  // Labels the whole queue through the API using ground truth.
  void LabelAll(const std::string& run) {
    while (true) {
      const ApiResponse next =
          Call("GET", "/runs/" + run + "/queue/next", nullptr, {{"annotator", "oracle"}});
      ASSERT_EQ(next.status, 200);
      if (next.body.at("empty").get<bool>()) break;
      const std::string id = next.body.at("item").at("admission_id");
      const ApiResponse r =
          Call("POST", "/runs/" + run + "/labels",
               {{"admission_id", id},
                {"annotator", "oracle"},
                {"label", generated_->truth.Get(id).true_label}});
      ASSERT_EQ(r.status, 200) << r.body.dump();
    }
  }

  static std::filesystem::path* corpus_dir_;
  static synth::GeneratedCorpus* generated_;
  std::filesystem::path data_dir_;
  std::unique_ptr<RunManager> runs_;
  std::unique_ptr<Api> api_;
};

std::filesystem::path* ServiceTest::corpus_dir_ = nullptr;
synth::GeneratedCorpus* ServiceTest::generated_ = nullptr;

TEST_F(ServiceTest, Health) {
  const ApiResponse r = Call("GET", "/health");
  EXPECT_EQ(r.status, 200);
}

TEST_F(ServiceTest, CreateRunTrainsInitialModel) {
  const std::string id = CreateRun();
  const ApiResponse r = Call("GET", "/runs/" + id);
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["status"], "AwaitingLabels");
  EXPECT_EQ(r.body["busy"], false);
  EXPECT_GT(r.body["queue_size"].get<int>(), 0);
  EXPECT_TRUE(std::filesystem::exists(data_dir_ / "runs" / id / "run.json"));
  EXPECT_TRUE(std::filesystem::exists(data_dir_ / "runs" / id / "events.jsonl"));
}

TEST_F(ServiceTest, ValidationErrors) {
  ApiResponse r = Call("POST", "/runs", {{"corpus", corpus_dir_->string()}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["code"], "validation_error");
  r = Call("POST", "/runs", {{"disease", "Cancer Cachexia"}, {"corpus", "/no/such/dir"}});
  EXPECT_EQ(r.status, 400);
  r = Call("POST", "/runs", {{"disease", "Gout"}, {"corpus", corpus_dir_->string()}});
  EXPECT_EQ(r.status, 400);
  ApiRequest bad;
  bad.method = "POST";
  bad.path = "/runs";
  bad.body = "{not json";
  EXPECT_EQ(api_->Handle(bad).status, 400);

  const std::string id = CreateRun();
  r = Call("GET", "/runs/" + id + "/queue/next");
  EXPECT_EQ(r.status, 400);
  r = Call("POST", "/runs/" + id + "/labels", {{"admission_id", "x"}, {"annotator", "a"}});
  EXPECT_EQ(r.status, 400);
  r = Call("GET", "/runs/" + id + "/features/top", nullptr, {{"m", "zero"}});
  EXPECT_EQ(r.status, 400);
}

TEST_F(ServiceTest, NotFoundAndMethod) {
  EXPECT_EQ(Call("GET", "/runs/run-missing").status, 404);
  EXPECT_EQ(Call("GET", "/nowhere").status, 404);
  EXPECT_EQ(Call("DELETE", "/health").status, 405);
  const std::string id = CreateRun();
  EXPECT_EQ(Call("GET", "/runs/" + id + "/explanations/none").status, 404);
  const std::string queued = runs_->State(id).queue.front();
  EXPECT_EQ(Call("GET", "/runs/" + id + "/explanations/" + queued).status, 409);
}

TEST_F(ServiceTest, ConflictCarriesRequiredState) {
  const std::string id = CreateRun();
  ApiResponse r = Call("GET", "/runs/" + id + "/features/top");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(r.body["required_state"], "AwaitingVerdicts");
  r = Call("POST", "/runs/" + id + "/iterate");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(r.body["code"], "conflict");
  EXPECT_EQ(r.body["required_state"], "AwaitingLabels with enough consensus labels");
  r = Call("POST", "/runs/" + id + "/features/verdicts",
           {{"reviewer", "r"}, {"verdicts", nlohmann::json::object()}});
  EXPECT_EQ(r.status, 409);
  EXPECT_TRUE(r.body.contains("required_state"));
}

TEST_F(ServiceTest, UnqueuedLabelRejected) {
  const std::string id = CreateRun();
  const ApiResponse r = Call("POST", "/runs/" + id + "/labels",
                             {{"admission_id", "nope"}, {"annotator", "a"}, {"label", true}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["code"], "queue_error");
}

TEST_F(ServiceTest, IdempotentReplay) {
  const nlohmann::json body = {{"disease", "Cancer Cachexia"},
                               {"corpus", corpus_dir_->string()},
                               {"config", SmallConfig()}};
  const ApiResponse first = Call("POST", "/runs", body, {}, "k1");
  ASSERT_EQ(first.status, 201);
  const ApiResponse again = Call("POST", "/runs", body, {}, "k1");
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(again.body["run_id"], first.body["run_id"]);

  const std::string id = first.body["run_id"];
  const std::string item =
      Call("GET", "/runs/" + id + "/queue/next", nullptr, {{"annotator", "a"}})
          .body["item"]["admission_id"];
  const nlohmann::json label = {{"admission_id", item}, {"annotator", "a"}, {"label", true}};
  ASSERT_EQ(Call("POST", "/runs/" + id + "/labels", label, {}, "k2").status, 200);
  const size_t events = runs_->State(id).gold.at(item).labels.size();
  // A retried label does not append a second event.
  Start();
  EXPECT_EQ(Call("POST", "/runs/" + id + "/labels", label, {}, "k2").status, 200);
  EXPECT_EQ(runs_->State(id).gold.at(item).labels.size(), events);
  EXPECT_EQ(Call("POST", "/runs", body, {}, "k1").body["run_id"], id);
}

TEST_F(ServiceTest, FullProtocolAndRestart) {
  const std::string id = CreateRun();
  LabelAll(id);
  ApiResponse r = Call("POST", "/runs/" + id + "/iterate");
  ASSERT_EQ(r.status, 202) << r.body.dump();
  r = Call("GET", "/runs/" + id);
  EXPECT_EQ(r.body["status"], "AwaitingVerdicts");
  EXPECT_EQ(r.body["iteration"], 1);

  r = Call("GET", "/runs/" + id + "/features/top", nullptr, {{"m", "5"}});
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body["features"].size(), 5u);
  const std::string top = r.body["features"][0]["feature"];
  EXPECT_TRUE(r.body["features"][0].contains("direction"));

  r = Call("POST", "/runs/" + id + "/features/verdicts",
           {{"reviewer", "rev"}, {"verdicts", {{top, "Irrelevant"}}}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  const size_t mask = Call("GET", "/runs/" + id).body["mask_size"];
  r = Call("POST", "/runs/" + id + "/features/reinstate", {{"feature", top}, {"reviewer", "rev"}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(Call("GET", "/runs/" + id).body["mask_size"], mask + 1);
  r = Call("POST", "/runs/" + id + "/features/verdicts",
           {{"reviewer", "rev"}, {"verdicts", {{top, "Maybe"}}}});
  EXPECT_EQ(r.status, 400);

  r = Call("GET", "/runs/" + id + "/metrics");
  EXPECT_EQ(r.status, 200);
  const std::string aid = runs_->State(id).queue.front();
  r = Call("GET", "/runs/" + id + "/explanations/" + aid);
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["iteration"], 1);

  r = Call("POST", "/runs/" + id + "/iterate");
  ASSERT_EQ(r.status, 202);
  // Terminal after two iterations; the estimate sample joins the queue.
  const loop::LoopState live = runs_->State(id);
  EXPECT_TRUE(loop::IsTerminal(live.status));
  EXPECT_TRUE(live.estimate.has_value());
  EXPECT_EQ(Call("POST", "/runs/" + id + "/iterate").status, 409);

  Start();
  EXPECT_EQ(runs_->State(id), live);
  EXPECT_EQ(Call("GET", "/runs/" + id).body["status"], std::string(loop::StatusName(live.status)));
}

TEST(ServiceWorkerTest, BackgroundJobsComplete) {
  const auto dir = testing::TempDir("svc-worker");
  const auto gen = testing::CachexiaCorpus(200, 0.15, 4);
  loop::WriteSimulationInput(dir / "corpus",
                             {gen.admissions, gen.truth, synth::LoadShippedProfile("cachexia")});
  RunManager runs(ServiceOptions{dir / "data", Execution::kSerial, false});
  const nlohmann::json created = runs.CreateRun(
      {{"disease", "Cancer Cachexia"}, {"corpus", (dir / "corpus").string()},
       {"config", SmallConfig()}});
  runs.WaitIdle();
  const nlohmann::json run = runs.GetRun(created["run_id"]);
  EXPECT_EQ(run["status"], "AwaitingLabels");
  EXPECT_EQ(run["busy"], false);
}

}  // namespace
}  // namespace phenoid::service
