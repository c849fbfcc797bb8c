#include <algorithm>
#include <cmath>
#include <numeric>

#include "phenoid/automl/models.h"
#include "phenoid/common/rng.h"

namespace phenoid::automl {

namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::pair<double, double> FitPlattSigmoid(std::span<const double> decision,
                                          std::span<const int> y) {
  // Newton iteration with backtracking line search (Lin, Lin and Weng).
  const size_t n = decision.size();
  double prior1 = 0, prior0 = 0;
  for (int v : y) (v ? prior1 : prior0) += 1;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (size_t i = 0; i < n; ++i) t[i] = y[i] ? hi : lo;

  double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto objective = [&](double aa, double bb) {
    double f = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double z = decision[i] * aa + bb;
      f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1) * z + std::log1p(std::exp(z));
    }
    return f;
  };
  double fval = objective(a, b);
  const double sigma = 1e-12;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = sigma, h22 = sigma, h21 = 0, g1 = 0, g2 = 0;
    for (size_t i = 0; i < n; ++i) {
      const double z = decision[i] * a + b;
      double p, q;
      if (z >= 0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += decision[i] * decision[i] * d2;
      h22 += d2;
      h21 += decision[i] * d2;
      const double d1 = t[i] - p;
      g1 += decision[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    bool moved = false;
    while (step >= 1e-10) {
      const double na = a + step * da, nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        moved = true;
        break;
      }
      step /= 2.0;
    }
    if (!moved) break;
  }
  return {a, b};
}

double LinearSvmModel::Decision(std::span<const double> x) const { return Dot(x, w_) + b_; }

double LinearSvmModel::PredictProba(std::span<const double> x) const {
  // Platt form: P(y=1|f) = 1 / (1 + exp(A f + B)).
  return Sigmoid(-(platt_a_ * Decision(x) + platt_b_));
}

std::unique_ptr<LinearSvmModel> LinearSvmModel::Fit(const features::DenseMatrix& x,
                                                    std::span<const int> y,
                                                    const Hyperparameters& hp,
                                                    const FitContext& ctx) {
  const double lambda = GetParam(hp, "lambda", 1e-2);
  const int epochs = ScaledIterations(ctx.resource, kMaxEpochs);
  const size_t d = x.cols;
  // Offset keeps the first steps near 1 when lambda is small.
  const double t0 = std::max(1.0, 1.0 / lambda);
  Rng rng(DeriveSeed(ctx.seed, "svm"));

  std::vector<double> w(d, 0.0), avg_w(d, 0.0);
  double b = 0.0, avg_b = 0.0;
  std::vector<size_t> order(x.rows);
  std::iota(order.begin(), order.end(), size_t{0});
  double t = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.Shuffle(order);
    for (size_t r : order) {
      t += 1.0;
      const double eta = 1.0 / (lambda * (t + t0));
      const auto row = x.row(r);
      const double sign = y[r] ? 1.0 : -1.0;
      const double margin = sign * (Dot(row, w) + b);
      const double shrink = 1.0 - eta * lambda;
      for (size_t c = 0; c < d; ++c) w[c] *= shrink;
      if (margin < 1.0) {
        for (size_t c = 0; c < d; ++c) w[c] += eta * sign * row[c];
        b += eta * sign;
      }
      const double mix = 1.0 / t;
      for (size_t c = 0; c < d; ++c) avg_w[c] += (w[c] - avg_w[c]) * mix;
      avg_b += (b - avg_b) * mix;
    }
  }

  std::vector<double> decision(x.rows);
  for (size_t r = 0; r < x.rows; ++r) decision[r] = Dot(x.row(r), avg_w) + avg_b;
  auto [pa, pb] = FitPlattSigmoid(decision, y);
  return std::make_unique<LinearSvmModel>(std::move(avg_w), avg_b, pa, pb);
}

nlohmann::json LinearSvmModel::ToJson() const {
  return {{"family", FamilyName(family())},
          {"weights", w_},
          {"bias", b_},
          {"platt_a", platt_a_},
          {"platt_b", platt_b_}};
}

std::unique_ptr<LinearSvmModel> LinearSvmModel::FromJson(const nlohmann::json& j) {
  return std::make_unique<LinearSvmModel>(j.at("weights").get<std::vector<double>>(),
                                          j.at("bias").get<double>(),
                                          j.at("platt_a").get<double>(),
                                          j.at("platt_b").get<double>());
}

}  // namespace phenoid::automl
