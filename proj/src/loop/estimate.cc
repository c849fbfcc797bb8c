#include "phenoid/loop/estimate.h"

#include <algorithm>
#include <cmath>

#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"

namespace phenoid::loop {

int64_t RoundHalfUp(double x) {
  // A relative nudge lets x.4999999999 (an intended x.5) round up while
  // leaving genuine values such as 110.968 untouched.
  const double nudge = 1e-9 * std::max(1.0, std::abs(x));
  return static_cast<int64_t>(std::floor(x + 0.5 + nudge));
}

nlohmann::json EvaluationEstimate::ToJson() const {
  nlohmann::json j = {{"n_pred", n_pred}, {"p_est", p_est}, {"estimate", estimate}};
  if (!warning.empty()) j["warning"] = warning;
  return j;
}

EvaluationEstimate MakeEstimate(size_t n_pred, double p_est) {
  if (!(p_est >= 0.0 && p_est <= 1.0)) {
    throw Error(ErrorCode::kValidation, "estimated precision must lie in [0, 1]");
  }
  EvaluationEstimate e;
  e.n_pred = n_pred;
  e.p_est = p_est;
  e.estimate = RoundHalfUp(static_cast<double>(n_pred) * p_est);
  return e;
}

EstimateSample SampleForEstimate(std::span<const std::string> ids,
                                 std::span<const double> probabilities, size_t sample_n,
                                 uint64_t seed) {
  if (ids.size() != probabilities.size()) {
    throw Error(ErrorCode::kShape, "ids and predictions differ in length");
  }
  std::vector<std::string> positives;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (probabilities[i] >= 0.5) positives.push_back(ids[i]);
  }
  EstimateSample out;
  out.n_pred = positives.size();
  Rng rng(DeriveSeed(seed, "estimate"));
  for (size_t i : rng.SampleWithoutReplacement(positives.size(),
                                               std::min(sample_n, positives.size()))) {
    out.sample.push_back(positives[i]);
  }
  return out;
}

EvaluationEstimate EstimateEntireSet(std::span<const std::string> ids,
                                     std::span<const double> probabilities, size_t sample_n,
                                     const std::function<bool(const std::string&)>& confirm,
                                     uint64_t seed) {
  const EstimateSample s = SampleForEstimate(ids, probabilities, sample_n, seed);
  if (s.n_pred == 0) {
    EvaluationEstimate e;
    e.warning = "no predicted positives in the evaluation set";
    return e;
  }
  size_t confirmed = 0;
  for (const std::string& id : s.sample) confirmed += confirm(id) ? 1 : 0;
  return MakeEstimate(s.n_pred, static_cast<double>(confirmed) /
                                    static_cast<double>(s.sample.size()));
}

}  // namespace phenoid::loop
