#include <algorithm>
#include <cmath>
#include <numeric>

#include "phenoid/automl/models.h"
#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"

namespace phenoid::automl {

namespace {

constexpr double kWeightDecay = 1e-4;
constexpr double kGradClip = 5.0;

// Forward pass keeping every layer's activations; returns the output logit.
double Forward(const std::vector<MlpModel::Layer>& layers, std::span<const double> x,
               std::vector<std::vector<double>>* acts) {
  std::vector<double> cur(x.begin(), x.end());
  if (acts) acts->assign(1, cur);
  for (size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    std::vector<double> next(layer.out);
    for (size_t o = 0; o < layer.out; ++o) {
      double s = layer.b[o];
      const double* w = layer.w.data() + o * layer.in;
      for (size_t i = 0; i < layer.in; ++i) s += w[i] * cur[i];
      const bool hidden = l + 1 < layers.size();
      next[o] = hidden ? std::max(0.0, s) : s;
    }
    cur.swap(next);
    if (acts) acts->push_back(cur);
  }
  return cur[0];
}

}  // namespace

double MlpModel::PredictProba(std::span<const double> x) const {
  return Sigmoid(Forward(layers_, x, nullptr));
}

std::unique_ptr<MlpModel> MlpModel::Fit(const features::DenseMatrix& x, std::span<const int> y,
                                        const Hyperparameters& hp, const FitContext& ctx) {
  const size_t width = static_cast<size_t>(GetParam(hp, "width", 16));
  const int n_hidden = static_cast<int>(GetParam(hp, "layers", 1));
  const double step = GetParam(hp, "step", 1e-2);
  if (width < 1 || n_hidden < 1 || n_hidden > 2 || !(step > 0)) {
    throw Error(ErrorCode::kConfig, "invalid MLP hyperparameters");
  }
  const int epochs = ScaledIterations(ctx.resource, kMaxEpochs);
  Rng rng(DeriveSeed(ctx.seed, "mlp"));

  std::vector<Layer> layers;
  size_t in = x.cols;
  for (int h = 0; h <= n_hidden; ++h) {
    Layer layer;
    layer.in = in;
    layer.out = h < n_hidden ? width : 1;
    // He initialization for ReLU layers, Xavier-style for the output unit.
    const double scale = std::sqrt((h < n_hidden ? 2.0 : 1.0) / static_cast<double>(in));
    layer.w.resize(layer.in * layer.out);
    for (double& w : layer.w) w = rng.Normal(0.0, scale);
    layer.b.assign(layer.out, 0.0);
    layers.push_back(std::move(layer));
    in = width;
  }

  std::vector<Layer> grads = layers;
  std::vector<size_t> order(x.rows);
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<std::vector<double>> acts;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.Shuffle(order);
    for (size_t start = 0; start < order.size(); start += kBatchSize) {
      const size_t end = std::min(order.size(), start + kBatchSize);
      for (Layer& g : grads) {
        std::fill(g.w.begin(), g.w.end(), 0.0);
        std::fill(g.b.begin(), g.b.end(), 0.0);
      }
      for (size_t k = start; k < end; ++k) {
        const size_t r = order[k];
        const double logit = Forward(layers, x.row(r), &acts);
        std::vector<double> delta{Sigmoid(logit) - y[r]};
        for (size_t l = layers.size(); l-- > 0;) {
          const Layer& layer = layers[l];
          Layer& g = grads[l];
          const std::vector<double>& input = acts[l];
          std::vector<double> back(layer.in, 0.0);
          for (size_t o = 0; o < layer.out; ++o) {
            g.b[o] += delta[o];
            const double* w = layer.w.data() + o * layer.in;
            double* gw = g.w.data() + o * layer.in;
            for (size_t i = 0; i < layer.in; ++i) {
              gw[i] += delta[o] * input[i];
              back[i] += delta[o] * w[i];
            }
          }
          if (l > 0) {
            for (size_t i = 0; i < layer.in; ++i) back[i] = input[i] > 0.0 ? back[i] : 0.0;
          }
          delta.swap(back);
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      double norm = 0.0;
      for (const Layer& g : grads) {
        for (double v : g.w) norm += v * v * inv * inv;
        for (double v : g.b) norm += v * v * inv * inv;
      }
      norm = std::sqrt(norm);
      const double clip = norm > kGradClip ? kGradClip / norm : 1.0;
      for (size_t l = 0; l < layers.size(); ++l) {
        for (size_t i = 0; i < layers[l].w.size(); ++i) {
          layers[l].w[i] -= step * (grads[l].w[i] * inv * clip + kWeightDecay * layers[l].w[i]);
        }
        for (size_t i = 0; i < layers[l].b.size(); ++i) {
          layers[l].b[i] -= step * grads[l].b[i] * inv * clip;
        }
      }
    }
  }
  return std::make_unique<MlpModel>(std::move(layers));
}

nlohmann::json MlpModel::ToJson() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : layers_) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"w", l.w}, {"b", l.b}});
  }
  return {{"family", FamilyName(family())}, {"layers", layers}};
}

std::unique_ptr<MlpModel> MlpModel::FromJson(const nlohmann::json& j) {
  std::vector<Layer> layers;
  for (const auto& l : j.at("layers")) {
    Layer layer;
    layer.in = l.at("in").get<size_t>();
    layer.out = l.at("out").get<size_t>();
    layer.w = l.at("w").get<std::vector<double>>();
    layer.b = l.at("b").get<std::vector<double>>();
    if (layer.w.size() != layer.in * layer.out || layer.b.size() != layer.out) {
      throw Error(ErrorCode::kParse, "MLP layer shape mismatch");
    }
    layers.push_back(std::move(layer));
  }
  if (layers.empty() || layers.back().out != 1) throw Error(ErrorCode::kParse, "bad MLP layers");
  return std::make_unique<MlpModel>(std::move(layers));
}

}  // namespace phenoid::automl
