#ifndef PHENOID_SHAP_SHAPLEY_H_
#define PHENOID_SHAP_SHAPLEY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phenoid/common/parallel.h"
#include "phenoid/features/matrix.h"

namespace phenoid::shap {

// Model output for one complete row; must be safe to call concurrently.
using Scorer = std::function<double(std::span<const double>)>;

struct ShapValues {
  double base_value = 0.0;  // mean scorer output over the background rows
  double output = 0.0;      // scorer output at the explained row
  std::vector<double> phi;
};

// Largest feature count accepted by ExactShapley.
inline constexpr size_t kMaxExactFeatures = 20;

// Enumerates every coalition; v(S) takes features in S from `row` and the rest
// from each background row, averaged. More than 20 features -> Error(kSize).
ShapValues ExactShapley(const Scorer& f, std::span<const double> row,
                        const features::DenseMatrix& background);

// Default coalition count: 2d + 2048, capped at 2^d.
size_t DefaultCoalitions(size_t d);

// Shapley-kernel weighted least squares with the efficiency constraint solved
// exactly. With n_coalitions >= 2^d every coalition is enumerated and the
// result is exact; otherwise coalition sizes are sampled in proportion to the
// kernel mass and paired with their complements. n_coalitions < d + 2 ->
// Error(kSize); a rank-deficient design is resampled with twice as many
// coalitions, up to three times, then Error(kDegenerate).
ShapValues KernelShap(const Scorer& f, std::span<const double> row,
                      const features::DenseMatrix& background, size_t n_coalitions,
                      uint64_t seed);

// Rows drawn without replacement, kept in their original order.
features::DenseMatrix SelectBackground(const features::DenseMatrix& rows, size_t n, uint64_t seed);

struct Explanation {
  std::string admission_id;
  std::vector<std::string> features;
  double base_value = 0.0;
  double output = 0.0;
  std::vector<double> phi;  // aligned to features
};

struct ExplainOptions {
  size_t n_coalitions = 0;  // 0: DefaultCoalitions(d)
  uint64_t seed = 0;
  Execution execution = Execution::kParallel;
};

// Kernel SHAP for every row of `rows`; rows are independent and explained in
// parallel, each with a seed derived from its index.
std::vector<Explanation> ExplainRows(const Scorer& f, const features::DenseMatrix& rows,
                                     std::span<const std::string> row_ids,
                                     std::span<const std::string> feature_names,
                                     const features::DenseMatrix& background,
                                     const ExplainOptions& options = {});

}  // namespace phenoid::shap

#endif  // PHENOID_SHAP_SHAPLEY_H_
