#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"
#include "phenoid/loop/estimate.h"
#include "phenoid/loop/events.h"
#include "phenoid/loop/quadrant.h"
#include "phenoid/loop/state.h"
#include "testing.h"

namespace phenoid::loop {
namespace {

struct Population {
  std::vector<std::string> ids;
  std::vector<double> probs;
  std::vector<int> icd;
};

// `sizes` rows in each quadrant, in group order.
Population MakePopulation(std::array<size_t, 4> sizes) {
  Population p;
  for (size_t q = 0; q < 4; ++q) {
    for (size_t i = 0; i < sizes[q]; ++i) {
      p.ids.push_back("Q" + std::to_string(q) + "-" + std::to_string(i));
      p.probs.push_back(q < 2 ? 0.9 : 0.1);
      p.icd.push_back(q == 0 || q == 2);
    }
  }
  return p;
}

TEST(QuadrantTest, FullGroups) {
  const Population p = MakePopulation({40, 30, 50, 60});
  const auto s = SampleQuadrants(p.ids, p.probs, p.icd, 25, 1);
  EXPECT_EQ(s.size(), 100u);
  for (size_t q = 0; q < 4; ++q) {
    EXPECT_EQ(s.groups[q].size(), 25u);
    for (const auto& id : s.groups[q]) EXPECT_EQ(id.substr(0, 2), "Q" + std::to_string(q));
  }
  EXPECT_EQ(s.group_sizes, (std::array<size_t, 4>{40, 30, 50, 60}));
  const auto ordered = s.Ordered();
  EXPECT_EQ(std::set<std::string>(ordered.begin(), ordered.end()).size(), 100u);
}

TEST(QuadrantTest, ShortGroupReallocated) {
  const Population p = MakePopulation({3, 30, 50, 60});
  const auto s = SampleQuadrants(p.ids, p.probs, p.icd, 25, 2);
  EXPECT_EQ(s.groups[0].size(), 3u);
  EXPECT_EQ(s.shortfall, 22u);
  EXPECT_EQ(s.reallocated, 22u);
  EXPECT_EQ(s.fill.size(), 22u);
  EXPECT_EQ(s.size(), 100u);
  // Fill comes from the largest remaining group.
  for (const auto& id : s.fill) EXPECT_EQ(id.substr(0, 2), "Q3");
}

TEST(QuadrantTest, DeterministicAndJsonRoundTrip) {
  const Population p = MakePopulation({10, 30, 5, 60});
  const auto a = SampleQuadrants(p.ids, p.probs, p.icd, 25, 3);
  EXPECT_EQ(a, SampleQuadrants(p.ids, p.probs, p.icd, 25, 3));
  EXPECT_EQ(QuadrantSample::FromJson(a.ToJson()), a);
}

TEST(QuadrantTest, ThresholdIsInclusive) {
  const std::vector<std::string> ids = {"a", "b"};
  const std::vector<double> probs = {0.5, 0.4999};
  const std::vector<int> icd = {0, 0};
  const auto s = SampleQuadrants(ids, probs, icd, 5, 1);
  EXPECT_EQ(s.groups[1], std::vector<std::string>{"a"});
  EXPECT_EQ(s.groups[3], std::vector<std::string>{"b"});
}

TEST(QuadrantTest, EmptyAndMisaligned) {
  try {
    SampleQuadrants({}, {}, {}, 25, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSample);
  }
  const std::vector<std::string> ids = {"a"};
  const std::vector<double> probs = {0.1, 0.2};
  const std::vector<int> icd = {0};
  EXPECT_THROW(SampleQuadrants(ids, probs, icd, 25, 1), Error);
}

TEST(EstimateTest, PublishedRows) {
  EXPECT_EQ(MakeEstimate(326, 0.969).estimate, 316);
  EXPECT_EQ(MakeEstimate(143, 0.776).estimate, 111);
  EXPECT_EQ(MakeEstimate(1209, 0.766).estimate, 926);
  EXPECT_EQ(MakeEstimate(142, 0.758).estimate, 108);
}

TEST(EstimateTest, RoundHalfUp) {
  EXPECT_EQ(RoundHalfUp(2.5), 3);
  EXPECT_EQ(RoundHalfUp(2.4999), 2);
  EXPECT_EQ(RoundHalfUp(0.0), 0);
  EXPECT_EQ(RoundHalfUp(10 * 0.35), 4);
  EXPECT_THROW(MakeEstimate(10, 1.5), Error);
}

TEST(EstimateTest, SamplesOnlyPredictedPositives) {
  std::vector<std::string> ids;
  std::vector<double> probs;
  for (int i = 0; i < 300; ++i) {
    ids.push_back("A" + std::to_string(i));
    probs.push_back(i % 3 == 0 ? 0.8 : 0.2);
  }
  const auto s = SampleForEstimate(ids, probs, 50, 1);
  EXPECT_EQ(s.n_pred, 100u);
  EXPECT_EQ(s.sample.size(), 50u);
  for (const auto& id : s.sample) EXPECT_EQ(std::stoi(id.substr(1)) % 3, 0);
  const auto est = EstimateEntireSet(
      ids, probs, 50, [](const std::string& id) { return std::stoi(id.substr(1)) % 2 == 0; }, 1);
  EXPECT_EQ(est.n_pred, 100u);
  EXPECT_EQ(est.estimate, RoundHalfUp(100 * est.p_est));
}

TEST(EstimateTest, NoPredictedPositivesWarns) {
  const std::vector<std::string> ids = {"a"};
  const std::vector<double> probs = {0.1};
  const auto est = EstimateEntireSet(ids, probs, 10, [](const std::string&) { return true; }, 1);
  EXPECT_EQ(est.estimate, 0);
  EXPECT_FALSE(est.warning.empty());
}

TEST(GoldLabelTest, ConsensusRules) {
  GoldLabel g;
  g.labels = {{"a", true}, {"b", true}, {"c", false}};
  g.Recompute(3);
  EXPECT_EQ(g.consensus, true);
  g.labels = {{"a", true}};
  g.Recompute(3);
  EXPECT_FALSE(g.consensus.has_value());
  g.labels = {{"oracle", true}};
  g.Recompute(1);
  EXPECT_EQ(g.consensus, true);
  g.labels = {{"a", true}, {"b", false}};
  g.Recompute(2);
  EXPECT_FALSE(g.consensus.has_value());
}

TEST(EventLogTest, AppendAndReadBack) {
  const auto dir = testing::TempDir("events");
  EventLog log(dir / "events.jsonl");
  log.Append("a", {{"x", 1}});
  log.Append("b", nlohmann::json::object());
  const auto events = EventLog::ReadFile(dir / "events.jsonl");
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].seq, 1u);
  EXPECT_EQ(events[1].type, "b");
  EXPECT_EQ(events[0].payload["x"], 1);
}

TEST(EventLogTest, TornLastLineDropped) {
  const auto dir = testing::TempDir("torn");
  EventLog log(dir / "events.jsonl");
  log.Append("a", nlohmann::json::object());
  {
    std::ofstream out(dir / "events.jsonl", std::ios::app);
    out << R"({"seq":2,"type":"b","ti)";
  }
  EventLog reopened = EventLog::Open(dir / "events.jsonl");
  EXPECT_EQ(reopened.events().size(), 1u);
  reopened.Append("c", nlohmann::json::object());
  const auto events = EventLog::ReadFile(dir / "events.jsonl");
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].seq, 2u);
  EXPECT_EQ(events[1].type, "c");
}

TEST(EventLogTest, CorruptMiddleLineRejected) {
  const auto dir = testing::TempDir("corrupt");
  WriteFileAtomic(dir / "events.jsonl", "garbage\n{}\n");
  EXPECT_THROW(EventLog::ReadFile(dir / "events.jsonl"), Error);
}

TEST(EventLogTest, SequenceGapRejected) {
  const auto dir = testing::TempDir("gap");
  Event a{1, UtcTimestamp(), "x", nlohmann::json::object()};
  Event b{3, UtcTimestamp(), "x", nlohmann::json::object()};
  WriteFileAtomic(dir / "events.jsonl", a.ToJson().dump() + "\n" + b.ToJson().dump() + "\n");
  EXPECT_THROW(EventLog::ReadFile(dir / "events.jsonl"), Error);
}

TEST(StateTest, RunCreatedSetsConfig) {
  LoopConfig c;
  c.disease = "Lung Cancer";
  c.seed = 5;
  const Event e{1, UtcTimestamp(), kRunCreated, {{"config", c.ToJson()}}};
  const LoopState s = FoldEvents({e});
  ASSERT_TRUE(s.config.has_value());
  EXPECT_EQ(s.config->seed, 5u);
  EXPECT_EQ(s.status, Status::kInitializing);
}

TEST(StateTest, UnknownEventType) {
  LoopState s;
  EXPECT_THROW(ApplyEvent(s, Event{1, "", "mystery", nlohmann::json::object()}), Error);
}

TEST(ConfigTest, JsonRoundTripAndValidation) {
  LoopConfig c;
  c.disease = "Cancer Cachexia";
  c.quota = 10;
  c.families = {"RandomForest"};
  const LoopConfig again = LoopConfig::FromJson(c.ToJson());
  EXPECT_EQ(again.ToJson(), c.ToJson());
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.Criteria().disease, "Cancer Cachexia");
  LoopConfig bad = c;
  bad.epsilon = -1;
  EXPECT_THROW(bad.Validate(), Error);
  bad = c;
  bad.families = {"KNN"};
  EXPECT_THROW(bad.Validate(), Error);
  bad = c;
  bad.disease = "Gout";
  EXPECT_THROW(bad.Validate(), Error);
  bad.inclusion = "274.*";
  EXPECT_NO_THROW(bad.Validate());
  EXPECT_NE(c.Space(1).seed, c.Space(2).seed);
}

}  // namespace
}  // namespace phenoid::loop
