#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"
#include "phenoid/shap/importance.h"
#include "phenoid/shap/shapley.h"
#include "testing.h"

namespace phenoid::shap {
namespace {

using features::DenseMatrix;

DenseMatrix RandomRows(size_t n, size_t d, uint64_t seed) {
  Rng rng(seed);
  DenseMatrix m(n, d);
  for (double& v : m.data) v = rng.Normal(0, 1);
  return m;
}

double Sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(ExactShapleyTest, LinearScorerByHand) {
  // Coalitions {}, {1}, {2}, {1,2} give v = 0, 2, 3, 5.
  const Scorer f = [](std::span<const double> x) { return 2 * x[0] + 3 * x[1]; };
  const DenseMatrix bg(1, 2, 0.0);
  const std::vector<double> row = {1, 1};
  const ShapValues s = ExactShapley(f, row, bg);
  EXPECT_NEAR(s.phi[0], 2.0, 1e-12);
  EXPECT_NEAR(s.phi[1], 3.0, 1e-12);
  EXPECT_NEAR(s.base_value, 0.0, 1e-12);
  EXPECT_NEAR(s.output, 5.0, 1e-12);
}

TEST(ExactShapleyTest, ConstantScorerIsAllZero) {
  const Scorer f = [](std::span<const double>) { return 0.7; };
  const auto s = ExactShapley(f, std::vector<double>{1, 2, 3}, RandomRows(4, 3, 1));
  for (double p : s.phi) EXPECT_EQ(p, 0.0);
}

TEST(ExactShapleyTest, SymmetricFeaturesShareCredit) {
  const Scorer f = [](std::span<const double> x) { return x[0] * x[1] + x[2]; };
  DenseMatrix bg(2, 3);
  bg.at(0, 0) = bg.at(0, 1) = 0.5;
  bg.at(1, 0) = bg.at(1, 1) = -1.0;
  bg.at(0, 2) = 2.0;
  const auto s = ExactShapley(f, std::vector<double>{3, 3, 0}, bg);
  EXPECT_NEAR(s.phi[0], s.phi[1], 1e-12);
}

TEST(ExactShapleyTest, MatchesPermutationDefinition) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const size_t d = 2 + seed % 5;
    const auto model = testing::MakeRandomModel(d, static_cast<int>(seed % 3), seed);
    const DenseMatrix bg = RandomRows(3, d, seed + 100);
    const DenseMatrix row = RandomRows(1, d, seed + 200);
    const auto s = ExactShapley(model.f, row.row(0), bg);
    const auto oracle = testing::PermutationShapley(model.f, row.row(0), bg);
    for (size_t j = 0; j < d; ++j) EXPECT_NEAR(s.phi[j], oracle[j], 1e-9) << seed;
  }
}

TEST(ExactShapleyTest, TooManyFeatures) {
  const Scorer f = [](std::span<const double>) { return 0.0; };
  try {
    ExactShapley(f, std::vector<double>(21, 0.0), DenseMatrix(1, 21));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSize);
  }
}

TEST(KernelShapTest, FullEnumerationEqualsExact) {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    const size_t d = 1 + seed % 10;
    const auto model = testing::MakeRandomModel(d, static_cast<int>(seed % 3), seed);
    const DenseMatrix bg = RandomRows(4, d, seed + 1);
    const DenseMatrix row = RandomRows(1, d, seed + 2);
    const auto exact = ExactShapley(model.f, row.row(0), bg);
    const auto kernel = KernelShap(model.f, row.row(0), bg, size_t{1} << d, seed);
    for (size_t j = 0; j < d; ++j) EXPECT_NEAR(kernel.phi[j], exact.phi[j], 1e-6) << seed;
    EXPECT_NEAR(kernel.base_value + Sum(kernel.phi), kernel.output, 1e-6);
    for (size_t j : model.dummies) EXPECT_NEAR(kernel.phi[j], 0.0, 1e-6);
  }
}

TEST(KernelShapTest, SampledIsLocallyAccurateAndClose) {
  const size_t d = 14;
  const auto model = testing::MakeRandomModel(d, 0, 3);
  const DenseMatrix bg = RandomRows(10, d, 4);
  const DenseMatrix row = RandomRows(1, d, 5);
  const auto exact = ExactShapley(model.f, row.row(0), bg);
  const auto kernel = KernelShap(model.f, row.row(0), bg, 2000, 1);
  EXPECT_NEAR(kernel.base_value + Sum(kernel.phi), kernel.output, 1e-9);
  // A linear scorer is recovered exactly from any full-rank design.
  for (size_t j = 0; j < d; ++j) EXPECT_NEAR(kernel.phi[j], exact.phi[j], 1e-6);
}

TEST(KernelShapTest, SampledNonlinearApproximates) {
  const size_t d = 12;
  const auto model = testing::MakeRandomModel(d, 2, 6);
  const DenseMatrix bg = RandomRows(8, d, 7);
  const DenseMatrix row = RandomRows(1, d, 8);
  const auto exact = ExactShapley(model.f, row.row(0), bg);
  const auto kernel = KernelShap(model.f, row.row(0), bg, DefaultCoalitions(d), 2);
  EXPECT_NEAR(kernel.base_value + Sum(kernel.phi), kernel.output, 1e-9);
  for (size_t j = 0; j < d; ++j) EXPECT_NEAR(kernel.phi[j], exact.phi[j], 0.05) << j;
}

TEST(KernelShapTest, ConstantScorer) {
  const Scorer f = [](std::span<const double>) { return -1.5; };
  const auto s = KernelShap(f, std::vector<double>{1, 2, 3, 4}, RandomRows(3, 4, 1), 16, 0);
  for (double p : s.phi) EXPECT_NEAR(p, 0.0, 1e-12);
}

TEST(KernelShapTest, DeterministicAndValidated) {
  const auto model = testing::MakeRandomModel(15, 1, 9);
  const DenseMatrix bg = RandomRows(5, 15, 10);
  const DenseMatrix row = RandomRows(1, 15, 11);
  EXPECT_EQ(KernelShap(model.f, row.row(0), bg, 300, 4).phi,
            KernelShap(model.f, row.row(0), bg, 300, 4).phi);
  EXPECT_THROW(KernelShap(model.f, row.row(0), bg, 5, 4), Error);
}

TEST(KernelShapTest, DefaultCoalitionsCap) {
  EXPECT_EQ(DefaultCoalitions(3), 8u);
  EXPECT_EQ(DefaultCoalitions(11), 2048u);
  EXPECT_EQ(DefaultCoalitions(40), 2128u);
}

TEST(BackgroundTest, SubsetInOrder) {
  DenseMatrix rows(10, 1);
  for (size_t i = 0; i < 10; ++i) rows.at(i, 0) = static_cast<double>(i);
  const DenseMatrix bg = SelectBackground(rows, 4, 1);
  ASSERT_EQ(bg.rows, 4u);
  for (size_t i = 1; i < 4; ++i) EXPECT_LT(bg.at(i - 1, 0), bg.at(i, 0));
  EXPECT_EQ(SelectBackground(rows, 50, 1).rows, 10u);
}

TEST(ExplainRowsTest, SerialMatchesParallel) {
  const size_t d = 13;
  const auto model = testing::MakeRandomModel(d, 2, 12);
  const DenseMatrix rows = RandomRows(6, d, 13), bg = RandomRows(5, d, 14);
  std::vector<std::string> ids, names;
  for (size_t i = 0; i < 6; ++i) ids.push_back("A" + std::to_string(i));
  for (size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  ExplainOptions serial, parallel;
  serial.execution = Execution::kSerial;
  serial.n_coalitions = parallel.n_coalitions = 500;
  const auto a = ExplainRows(model.f, rows, ids, names, bg, serial);
  const auto b = ExplainRows(model.f, rows, ids, names, bg, parallel);
  ASSERT_EQ(a.size(), 6u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].admission_id, ids[i]);
    EXPECT_EQ(a[i].phi, b[i].phi);
  }
}

Explanation Expl(const std::string& id, std::vector<std::string> f, std::vector<double> phi) {
  return {id, std::move(f), 0.1, 0.1 + Sum(phi), std::move(phi)};
}

TEST(ImportanceTest, RanksByMeanAbs) {
  const auto g = ComputeGlobalImportance({Expl("A", {"a", "b"}, {0.4, -0.1})});
  ASSERT_EQ(g.ranked.size(), 2u);
  EXPECT_EQ(g.ranked[0].feature, "a");
  EXPECT_EQ(g.ranked[1].direction, Direction::kNegative);
  EXPECT_EQ(g.TopFeatures(1), std::vector<std::string>{"a"});
}

TEST(ImportanceTest, MixedDirection) {
  const auto g = ComputeGlobalImportance({Expl("A", {"a"}, {0.4}), Expl("B", {"a"}, {-0.4})});
  EXPECT_DOUBLE_EQ(g.ranked[0].mean_abs, 0.4);
  EXPECT_DOUBLE_EQ(g.ranked[0].mean_phi, 0.0);
  EXPECT_EQ(g.ranked[0].direction, Direction::kMixed);
}

TEST(ImportanceTest, RejectsMismatchedOrEmpty) {
  EXPECT_THROW(ComputeGlobalImportance({}), Error);
  EXPECT_THROW(
      ComputeGlobalImportance({Expl("A", {"a"}, {0.4}), Expl("B", {"b"}, {0.1})}), Error);
}

TEST(ImportanceTest, MergeEqualsRecompute) {
  const std::vector<Explanation> left = {Expl("A", {"a", "b"}, {0.4, -0.2}),
                                         Expl("B", {"a", "b"}, {0.1, 0.3})};
  const std::vector<Explanation> right = {Expl("C", {"a", "b"}, {-0.5, 0.0})};
  std::vector<Explanation> all = left;
  all.insert(all.end(), right.begin(), right.end());
  const auto merged = MergeImportance(ComputeGlobalImportance(left),
                                      ComputeGlobalImportance(right));
  const auto direct = ComputeGlobalImportance(all);
  ASSERT_EQ(merged.ranked.size(), direct.ranked.size());
  for (size_t i = 0; i < direct.ranked.size(); ++i) {
    EXPECT_EQ(merged.ranked[i].feature, direct.ranked[i].feature);
    EXPECT_NEAR(merged.ranked[i].mean_abs, direct.ranked[i].mean_abs, 1e-12);
    EXPECT_EQ(merged.ranked[i].direction, direct.ranked[i].direction);
  }
}

TEST(WaterfallTest, TelescopesToOutput) {
  const Explanation e = Expl("A", {"a", "b", "c"}, {0.2, -0.5, 0.05});
  const auto steps = Waterfall(e);
  ASSERT_EQ(steps.size(), 3u);
  EXPECT_EQ(steps[0].feature, "b");
  EXPECT_NEAR(steps.back().cumulative, e.base_value + Sum(e.phi), 1e-12);
  const std::string csv = ExportWaterfall(e);
  EXPECT_NE(csv.find("(base)"), std::string::npos);
}

TEST(BeeswarmTest, OneLinePerFeatureAndRow) {
  const auto m = testing::MatrixFrom({{1.5, 2.0}});
  const std::vector<Explanation> e = {
      {"r0", {"x0", "x1"}, 0.0, 0.3, {0.1, 0.2}}};
  const std::string csv = ExportBeeswarm(e, m);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "feature,admission_id,phi,value");
  EXPECT_NE(csv.find("x1,r0,0.2,2"), std::string::npos);
}

}  // namespace
}  // namespace phenoid::shap
