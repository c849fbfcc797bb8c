#include "phenoid/automl/tree.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phenoid::automl {

double DecisionTree::Predict(std::span<const double> x) const {
  int n = 0;
  while (nodes_[static_cast<size_t>(n)].feature >= 0) {
    const TreeNode& node = nodes_[static_cast<size_t>(n)];
    n = x[static_cast<size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<size_t>(n)].value;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].feature < 0) continue;
    d[static_cast<size_t>(nodes_[i].left)] = d[i] + 1;
    d[static_cast<size_t>(nodes_[i].right)] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

nlohmann::json DecisionTree::ToJson() const {
  std::vector<int> feature, left, right;
  std::vector<double> threshold, value;
  for (const TreeNode& n : nodes_) {
    feature.push_back(n.feature);
    left.push_back(n.left);
    right.push_back(n.right);
    threshold.push_back(n.threshold);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right},
          {"value", value}};
}

DecisionTree DecisionTree::FromJson(const nlohmann::json& j) {
  auto feature = j.at("feature").get<std::vector<int>>();
  auto threshold = j.at("threshold").get<std::vector<double>>();
  auto left = j.at("left").get<std::vector<int>>();
  auto right = j.at("right").get<std::vector<int>>();
  auto value = j.at("value").get<std::vector<double>>();
  std::vector<TreeNode> nodes(feature.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
  }
  return DecisionTree(std::move(nodes));
}

namespace {

struct Builder {
  const features::DenseMatrix& x;
  std::span<const double> target;
  std::span<const double> hessian;
  const TreeParams& params;
  LeafRule rule;
  Rng& rng;
  std::vector<TreeNode> nodes;

  double LeafValue(std::span<const size_t> idx) const {
    double s = 0.0, h = 0.0;
    for (size_t i : idx) {
      s += target[i];
      if (rule == LeafRule::kNewton) h += hessian[i];
    }
    if (rule == LeafRule::kMean) return s / static_cast<double>(idx.size());
    return s / (h + 1e-6);
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  Split FindSplit(std::vector<size_t>& idx) {
    const size_t d = x.cols;
    std::vector<size_t> features(d);
    std::iota(features.begin(), features.end(), size_t{0});
    size_t n_try = d;
    if (params.max_features > 0 && static_cast<size_t>(params.max_features) < d) {
      n_try = static_cast<size_t>(params.max_features);
      std::vector<size_t> picked = rng.SampleWithoutReplacement(d, n_try);
      std::sort(picked.begin(), picked.end());
      features = std::move(picked);
    }
    const size_t n = idx.size();
    double total = 0.0;
    for (size_t i : idx) total += target[i];
    const double parent = total * total / static_cast<double>(n);
    const size_t min_leaf = static_cast<size_t>(std::max(1, params.min_samples_leaf));

    Split best;
    std::vector<std::pair<double, size_t>> order(n);
    for (size_t f : features) {
      for (size_t k = 0; k < n; ++k) order[k] = {x.at(idx[k], f), idx[k]};
      std::sort(order.begin(), order.end());
      if (order.front().first == order.back().first) continue;
      double left_sum = 0.0;
      for (size_t k = 0; k + 1 < n; ++k) {
        left_sum += target[order[k].second];
        if (order[k].first == order[k + 1].first) continue;
        const size_t nl = k + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr) - parent;
        if (gain > best.gain + 1e-12) {
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (order[k].first + order[k + 1].first);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  int Grow(std::vector<size_t> idx, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{});
    nodes[static_cast<size_t>(id)].value = LeafValue(idx);
    const bool depth_ok = params.max_depth < 0 || depth < params.max_depth;
    const size_t min_leaf = static_cast<size_t>(std::max(1, params.min_samples_leaf));
    if (!depth_ok || idx.size() < 2 * min_leaf) return id;
    if (rule == LeafRule::kMean) {
      bool pure = true;
      for (size_t i : idx) pure = pure && target[i] == target[idx[0]];
      if (pure) return id;
    }
    Split split = FindSplit(idx);
    if (split.feature < 0) return id;
    std::vector<size_t> left, right;
    for (size_t i : idx) {
      (x.at(i, static_cast<size_t>(split.feature)) <= split.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = Grow(std::move(left), depth + 1);
    const int r = Grow(std::move(right), depth + 1);
    TreeNode& node = nodes[static_cast<size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }
};

}  // namespace

DecisionTree GrowTree(const features::DenseMatrix& x, std::span<const double> target,
                      std::span<const double> hessian, std::span<const size_t> sample,
                      const TreeParams& params, LeafRule rule, Rng& rng) {
  Builder b{x, target, hessian, params, rule, rng, {}};
  b.Grow(std::vector<size_t>(sample.begin(), sample.end()), 0);
  return DecisionTree(std::move(b.nodes));
}

}  // namespace phenoid::automl
