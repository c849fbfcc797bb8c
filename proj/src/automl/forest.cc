#include <algorithm>
#include <cmath>
#include <exception>

#include "phenoid/automl/models.h"
#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"

namespace phenoid::automl {

double RandomForestModel::PredictProba(std::span<const double> x) const {
  double s = 0.0;
  for (const DecisionTree& t : trees_) s += t.Predict(x);
  return s / static_cast<double>(trees_.size());
}

std::unique_ptr<RandomForestModel> RandomForestModel::Fit(const features::DenseMatrix& x,
                                                          std::span<const int> y,
                                                          const Hyperparameters& hp,
                                                          const FitContext& ctx) {
  const int full = static_cast<int>(GetParam(hp, "n_trees", kDefaultTrees));
  if (full < 1) throw Error(ErrorCode::kConfig, "n_trees must be >= 1");
  const int n_trees = ScaledIterations(ctx.resource, full);
  TreeParams params;
  params.max_depth = static_cast<int>(GetParam(hp, "max_depth", -1));
  params.max_features =
      std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(x.cols)))));

  std::vector<double> target(y.begin(), y.end());
  std::vector<DecisionTree> trees(static_cast<size_t>(n_trees));
  std::exception_ptr failure;
  // Each tree owns a seed derived from its index, so the forest does not
  // depend on scheduling.
#pragma omp parallel for schedule(dynamic) if (ctx.execution == Execution::kParallel)
  for (int t = 0; t < n_trees; ++t) {
    try {
      Rng rng(DeriveSeed(ctx.seed, static_cast<uint64_t>(t)));
      std::vector<size_t> sample(x.rows);
      for (size_t& s : sample) s = static_cast<size_t>(rng.Index(x.rows));
      trees[static_cast<size_t>(t)] =
          GrowTree(x, target, {}, sample, params, LeafRule::kMean, rng);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return std::make_unique<RandomForestModel>(std::move(trees));
}

std::vector<double> RandomForestModel::OutOfBag(const features::DenseMatrix& x,
                                                uint64_t seed) const {
  std::vector<double> sum(x.rows, 0.0);
  std::vector<int> count(x.rows, 0);
  std::vector<char> in_bag(x.rows);
  for (size_t t = 0; t < trees_.size(); ++t) {
    Rng rng(DeriveSeed(seed, static_cast<uint64_t>(t)));
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (size_t i = 0; i < x.rows; ++i) in_bag[rng.Index(x.rows)] = 1;
    for (size_t r = 0; r < x.rows; ++r) {
      if (in_bag[r]) continue;
      sum[r] += trees_[t].Predict(x.row(r));
      ++count[r];
    }
  }
  std::vector<double> out(x.rows);
  for (size_t r = 0; r < x.rows; ++r) {
    out[r] = count[r] > 0 ? sum[r] / count[r] : PredictProba(x.row(r));
  }
  return out;
}

nlohmann::json RandomForestModel::ToJson() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const DecisionTree& t : trees_) trees.push_back(t.ToJson());
  return {{"family", FamilyName(family())}, {"trees", trees}};
}

std::unique_ptr<RandomForestModel> RandomForestModel::FromJson(const nlohmann::json& j) {
  std::vector<DecisionTree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(DecisionTree::FromJson(t));
  if (trees.empty()) throw Error(ErrorCode::kParse, "forest without trees");
  return std::make_unique<RandomForestModel>(std::move(trees));
}

}  // namespace phenoid::automl
