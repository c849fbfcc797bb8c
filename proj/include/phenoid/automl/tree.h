#ifndef PHENOID_AUTOML_TREE_H_
#define PHENOID_AUTOML_TREE_H_

#include <span>
#include <vector>

#include "json.hpp"
#include "phenoid/common/rng.h"
#include "phenoid/features/matrix.h"

namespace phenoid::automl {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct TreeParams {
  int max_depth = -1;  // -1: unbounded
  int min_samples_leaf = 1;
  int max_features = 0;  // features tried per split; 0: all
};

// Leaf value rule: class frequency (Gini trees) or a Newton step on
// logistic-loss gradients (boosting trees).
enum class LeafRule { kMean, kNewton };

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double Predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

  nlohmann::json ToJson() const;
  static DecisionTree FromJson(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

// Grows a tree on the rows in `sample` (duplicates allowed, as in bootstrap
// samples). Splits maximize the reduction in squared error of `target`, which
// for 0/1 targets equals the Gini impurity decrease. `hessian` is only read
// for LeafRule::kNewton, where leaves are sum(target) / sum(hessian).
DecisionTree GrowTree(const features::DenseMatrix& x, std::span<const double> target,
                      std::span<const double> hessian, std::span<const size_t> sample,
                      const TreeParams& params, LeafRule rule, Rng& rng);

}  // namespace phenoid::automl

#endif  // PHENOID_AUTOML_TREE_H_
