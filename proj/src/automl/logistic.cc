#include <cmath>

#include "phenoid/automl/models.h"

namespace phenoid::automl {

namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// log(1 + exp(-m)) without overflow.
double LogLoss(double margin) {
  return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

double Objective(const features::DenseMatrix& x, std::span<const int> y,
                 const std::vector<double>& w, double b, double lambda) {
  double loss = 0.0;
  for (size_t r = 0; r < x.rows; ++r) {
    const double z = Dot(x.row(r), w) + b;
    loss += LogLoss(y[r] ? z : -z);
  }
  double reg = 0.0;
  for (double v : w) reg += v * v;
  return loss / static_cast<double>(x.rows) + 0.5 * lambda * reg;
}

}  // namespace

double LogisticModel::Decision(std::span<const double> x) const { return Dot(x, w_) + b_; }

double LogisticModel::PredictProba(std::span<const double> x) const {
  return Sigmoid(Decision(x));
}

std::unique_ptr<LogisticModel> LogisticModel::Fit(const features::DenseMatrix& x,
                                                  std::span<const int> y,
                                                  const Hyperparameters& hp,
                                                  const FitContext& ctx) {
  const double lambda = GetParam(hp, "lambda", 1e-2);
  const int epochs = ScaledIterations(ctx.resource, kMaxEpochs);
  const size_t d = x.cols;
  const double n = static_cast<double>(x.rows);
  std::vector<double> w(d, 0.0), gw(d), cand(d);
  double b = 0.0;
  double step = 1.0;
  double current = Objective(x, y, w, b, lambda);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (size_t r = 0; r < x.rows; ++r) {
      const auto row = x.row(r);
      const double err = Sigmoid(Dot(row, w) + b) - y[r];
      for (size_t c = 0; c < d; ++c) gw[c] += err * row[c];
      gb += err;
    }
    for (size_t c = 0; c < d; ++c) gw[c] = gw[c] / n + lambda * w[c];
    gb /= n;

    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      for (size_t c = 0; c < d; ++c) cand[c] = w[c] - step * gw[c];
      const double cand_b = b - step * gb;
      const double value = Objective(x, y, cand, cand_b, lambda);
      if (value <= current) {
        w.swap(cand);
        b = cand_b;
        current = value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // at a stationary point to machine precision
  }
  return std::make_unique<LogisticModel>(std::move(w), b);
}

nlohmann::json LogisticModel::ToJson() const {
  return {{"family", FamilyName(family())}, {"weights", w_}, {"bias", b_}};
}

std::unique_ptr<LogisticModel> LogisticModel::FromJson(const nlohmann::json& j) {
  return std::make_unique<LogisticModel>(j.at("weights").get<std::vector<double>>(),
                                         j.at("bias").get<double>());
}

}  // namespace phenoid::automl
