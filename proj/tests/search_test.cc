#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "phenoid/automl/search.h"
#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"
#include "testing.h"

namespace phenoid::automl {
namespace {

struct Data {
  features::FeatureMatrix m;
  std::vector<int> y;
};

Data Noisy(size_t n, size_t d, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> r;
    for (size_t j = 0; j < d; ++j) r.push_back(rng.Normal(0, 1));
    y.push_back(r[0] - 0.5 * r[1] + rng.Normal(0, 0.8) > 0);
    rows.push_back(r);
  }
  return {testing::MatrixFrom(rows), y};
}

SearchSpace SmallSpace(uint64_t seed) {
  SearchSpace space;
  space.seed = seed;
  space.budget_seconds = 600;
  space.k_grid = {2, 0};
  space.folds = 3;
  return space;
}

bool SameHistory(const SearchResult& a, const SearchResult& b) {
  if (a.history.size() != b.history.size()) return false;
  for (size_t i = 0; i < a.history.size(); ++i) {
    if (!a.history[i].SameOutcome(b.history[i])) return false;
  }
  return true;
}

TEST(ScheduleTest, StartSizesMatchRecurrence) {
  EXPECT_EQ(BracketStartSizes(9, 3), (std::vector<int>{9, 5, 3}));
  for (auto [r, eta] : std::vector<std::pair<int, int>>{{27, 3}, {81, 3}, {16, 2}, {10, 3}, {1, 3}}) {
    std::vector<int> expected;
    for (const auto& b : testing::HyperbandPlan(r, eta)) expected.push_back(b.sizes[0]);
    EXPECT_EQ(BracketStartSizes(r, eta), expected) << r << " " << eta;
  }
}

class HyperbandRunTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new Data(Noisy(90, 5, 1));
    result_ = new SearchResult(RunSearch(SmallSpace(3), data_->m, data_->y));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete result_;
  }
  static Data* data_;
  static SearchResult* result_;
};
Data* HyperbandRunTest::data_ = nullptr;
SearchResult* HyperbandRunTest::result_ = nullptr;

TEST_F(HyperbandRunTest, RungSizesAndResourcesFollowPlan) {
  const auto plan = testing::HyperbandPlan(9, 3);
  ASSERT_EQ(result_->brackets.size(), plan.size());
  for (size_t b = 0; b < plan.size(); ++b) {
    EXPECT_EQ(result_->brackets[b].s, plan[b].s);
    EXPECT_EQ(result_->brackets[b].rung_sizes, plan[b].sizes);
    EXPECT_NEAR(result_->brackets[b].resource_used, plan[b].cost, 1e-9);
    EXPECT_LE(result_->brackets[b].resource_used, 3.0 * 9.0 + 1e-9);
  }
  for (const TrialRecord& t : result_->history) {
    EXPECT_NEAR(t.config.resource, std::pow(3.0, t.rung - t.bracket), 1e-12);
  }
}

TEST_F(HyperbandRunTest, PromotionKeepsTheBest) {
  std::map<std::pair<int, int>, std::vector<const TrialRecord*>> rungs;
  for (const TrialRecord& t : result_->history) rungs[{t.bracket, t.rung}].push_back(&t);
  for (auto& [key, trials] : rungs) {
    const auto [s, rung] = key;
    if (rung == s) continue;
    std::vector<const TrialRecord*> sorted = trials;
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
      const bool an = std::isnan(a->score), bn = std::isnan(b->score);
      if (an != bn) return !an;
      if (!an && a->score != b->score) return a->score > b->score;
      return a->config_id < b->config_id;
    });
    const size_t keep = std::max<size_t>(1, trials.size() / 3);
    std::set<int> expected, promoted, next;
    for (size_t i = 0; i < keep; ++i) expected.insert(sorted[i]->config_id);
    for (auto* t : trials) {
      if (t->promoted) promoted.insert(t->config_id);
    }
    for (auto* t : rungs.at({s, rung + 1})) next.insert(t->config_id);
    EXPECT_EQ(promoted, expected);
    EXPECT_EQ(next, expected);
  }
}

TEST_F(HyperbandRunTest, BestIsTopFullResourceTrial) {
  double best = -1.0;
  for (const TrialRecord& t : result_->history) {
    if (t.rung == t.bracket && !std::isnan(t.score)) best = std::max(best, t.score);
  }
  EXPECT_EQ(result_->best_score, best);
  EXPECT_EQ(result_->best.resource, 1.0);
  ASSERT_TRUE(result_->model.has_value());
  EXPECT_EQ(result_->model->config(), result_->best);
  EXPECT_FALSE(result_->budget_exhausted);
}

TEST_F(HyperbandRunTest, ConfigsDrawnFromDomain) {
  for (const TrialRecord& t : result_->history) {
    EXPECT_TRUE(HyperparametersInDomain(t.config.family, t.config.hyperparameters));
    EXPECT_TRUE(t.config.k == 2 || t.config.k == 0);
  }
}

TEST_F(HyperbandRunTest, SameSeedSameHistory) {
  const SearchResult again = RunSearch(SmallSpace(3), data_->m, data_->y);
  EXPECT_TRUE(SameHistory(*result_, again));
  SearchSpace serial = SmallSpace(3);
  serial.pipeline.execution = Execution::kSerial;
  EXPECT_TRUE(SameHistory(*result_, RunSearch(serial, data_->m, data_->y)));
}

TEST_F(HyperbandRunTest, ReportsRenderEveryTrial) {
  const std::string text = FormatSearchReport(*result_);
  EXPECT_NE(text.find("best config"), std::string::npos);
  const auto j = SearchResultToJson(*result_);
  EXPECT_EQ(j["history"].size(), result_->history.size());
  EXPECT_EQ(j["brackets"].size(), 3u);
}

TEST(SearchTest, DegenerateSpaceReturnsThatConfig) {
  const Data d = Noisy(60, 3, 2);
  SearchSpace space = SmallSpace(1);
  space.families = {Family::kLogisticRegression};
  space.fixed[Family::kLogisticRegression] = {{"lambda", 0.05}};
  space.k_grid = {0};
  const SearchResult r = RunSearch(space, d.m, d.y);
  const TrialConfig expected{Family::kLogisticRegression, {{"lambda", 0.05}}, 0, 1.0};
  EXPECT_EQ(r.best, expected);
}

TEST(SearchTest, ZeroBudgetRaisesWithHistory) {
  const Data d = Noisy(60, 3, 3);
  SearchSpace space = SmallSpace(1);
  space.budget_seconds = 0;
  try {
    RunSearch(space, d.m, d.y);
    FAIL();
  } catch (const BudgetError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudget);
    EXPECT_TRUE(e.history().empty());
  }
}

TEST(SearchTest, AllowedColumnsRespected) {
  const Data d = Noisy(60, 5, 4);
  SearchSpace space = SmallSpace(2);
  space.families = {Family::kLogisticRegression, Family::kRandomForest};
  const std::vector<std::string> allowed = {"x1", "x3"};
  const SearchResult r = RunSearch(space, d.m, d.y, allowed);
  for (const std::string& f : r.model->feature_names()) {
    EXPECT_TRUE(f == "x1" || f == "x3") << f;
  }
}

TEST(SearchTest, TooFewLabelsPropagates) {
  Data d = Noisy(30, 2, 5);
  std::fill(d.y.begin(), d.y.end(), 0);
  d.y[0] = 1;
  try {
    RunSearch(SmallSpace(1), d.m, d.y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientLabels);
  }
}

TEST(SpaceTest, ValidateRejectsBadSettings) {
  SearchSpace s;
  s.eta = 1;
  EXPECT_THROW(s.Validate(), Error);
  s = {};
  s.families.clear();
  EXPECT_THROW(s.Validate(), Error);
  s = {};
  s.max_resource = 0;
  EXPECT_THROW(s.Validate(), Error);
  s = {};
  s.budget_seconds = -1;
  EXPECT_THROW(s.Validate(), Error);
}

TEST(SpaceTest, SamplesStayInDomain) {
  Rng rng(7);
  for (Family f : AllFamilies()) {
    for (int i = 0; i < 200; ++i) {
      EXPECT_TRUE(HyperparametersInDomain(f, SampleHyperparameters(f, rng)));
    }
  }
  EXPECT_FALSE(HyperparametersInDomain(Family::kRandomForest, {{"n_trees", 100000}}));
}

}  // namespace
}  // namespace phenoid::automl
