#ifndef PHENOID_LOOP_ESTIMATE_H_
#define PHENOID_LOOP_ESTIMATE_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace phenoid::loop {

// Nearest integer with halves rounded up, robust to binary representation
// error in products such as 326 * 0.969.
int64_t RoundHalfUp(double x);

struct EvaluationEstimate {
  size_t n_pred = 0;
  double p_est = 0.0;
  int64_t estimate = 0;
  std::string warning;

  nlohmann::json ToJson() const;
};

// estimate = RoundHalfUp(n_pred * p_est). p_est outside [0, 1] -> kValidation.
EvaluationEstimate MakeEstimate(size_t n_pred, double p_est);

struct EstimateSample {
  size_t n_pred = 0;
  std::vector<std::string> sample;  // predicted positives to be reviewed
};

// Predicted positives are rows with probability >= 0.5; up to sample_n of
// them are drawn without replacement by seed.
EstimateSample SampleForEstimate(std::span<const std::string> ids,
                                 std::span<const double> probabilities, size_t sample_n,
                                 uint64_t seed);

// Samples predicted positives, asks `confirm` about each and returns the
// estimate. No predicted positives -> all zeros with a warning.
EvaluationEstimate EstimateEntireSet(std::span<const std::string> ids,
                                     std::span<const double> probabilities, size_t sample_n,
                                     const std::function<bool(const std::string&)>& confirm,
                                     uint64_t seed);

}  // namespace phenoid::loop

#endif  // PHENOID_LOOP_ESTIMATE_H_
