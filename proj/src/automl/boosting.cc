#include <algorithm>
#include <cmath>
#include <numeric>

#include "phenoid/automl/models.h"
#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"

namespace phenoid::automl {

double GradientBoostingModel::PredictProba(std::span<const double> x) const {
  double f = init_;
  for (const DecisionTree& t : trees_) f += shrinkage_ * t.Predict(x);
  return Sigmoid(f);
}

std::unique_ptr<GradientBoostingModel> GradientBoostingModel::Fit(const features::DenseMatrix& x,
                                                                  std::span<const int> y,
                                                                  const Hyperparameters& hp,
                                                                  const FitContext& ctx) {
  const int full = static_cast<int>(GetParam(hp, "n_rounds", kDefaultRounds));
  if (full < 1) throw Error(ErrorCode::kConfig, "n_rounds must be >= 1");
  const int rounds = ScaledIterations(ctx.resource, full);
  const double shrinkage = GetParam(hp, "shrinkage", 0.1);
  TreeParams params;
  params.max_depth = static_cast<int>(GetParam(hp, "max_depth", 3));

  const size_t n = x.rows;
  double pos = 0.0;
  for (int v : y) pos += v;
  const double prior = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
  const double init = std::log(prior / (1.0 - prior));

  std::vector<double> f(n, init), grad(n), hess(n);
  std::vector<size_t> sample(n);
  std::iota(sample.begin(), sample.end(), size_t{0});
  Rng rng(DeriveSeed(ctx.seed, "boosting"));
  std::vector<DecisionTree> trees;
  trees.reserve(static_cast<size_t>(rounds));
  for (int round = 0; round < rounds; ++round) {
    for (size_t i = 0; i < n; ++i) {
      const double p = Sigmoid(f[i]);
      grad[i] = y[i] - p;
      hess[i] = std::max(p * (1.0 - p), 1e-12);
    }
    DecisionTree tree = GrowTree(x, grad, hess, sample, params, LeafRule::kNewton, rng);
    for (size_t i = 0; i < n; ++i) f[i] += shrinkage * tree.Predict(x.row(i));
    trees.push_back(std::move(tree));
  }
  return std::make_unique<GradientBoostingModel>(init, shrinkage, std::move(trees));
}

nlohmann::json GradientBoostingModel::ToJson() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const DecisionTree& t : trees_) trees.push_back(t.ToJson());
  return {{"family", FamilyName(family())},
          {"init", init_},
          {"shrinkage", shrinkage_},
          {"trees", trees}};
}

std::unique_ptr<GradientBoostingModel> GradientBoostingModel::FromJson(const nlohmann::json& j) {
  std::vector<DecisionTree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(DecisionTree::FromJson(t));
  return std::make_unique<GradientBoostingModel>(j.at("init").get<double>(),
                                                 j.at("shrinkage").get<double>(),
                                                 std::move(trees));
}

}  // namespace phenoid::automl
