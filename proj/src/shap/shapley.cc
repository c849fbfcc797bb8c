#include "phenoid/shap/shapley.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"

namespace phenoid::shap {

namespace {

using Mask = std::vector<uint8_t>;

// Mean scorer output with features in `mask` taken from `row`.
double CoalitionValue(const Scorer& f, std::span<const double> row,
                      const features::DenseMatrix& background, const Mask& mask,
                      std::vector<double>& scratch) {
  double total = 0.0;
  for (size_t b = 0; b < background.rows; ++b) {
    const auto bg = background.row(b);
    for (size_t i = 0; i < row.size(); ++i) scratch[i] = mask[i] ? row[i] : bg[i];
    total += f(scratch);
  }
  return total / static_cast<double>(background.rows);
}

void CheckInputs(std::span<const double> row, const features::DenseMatrix& background) {
  if (background.rows == 0) throw Error(ErrorCode::kSize, "empty background set");
  if (background.cols != row.size()) {
    throw Error(ErrorCode::kShape, "background and row have different widths");
  }
}

double LogChoose(size_t n, size_t k) {
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

struct Design {
  std::vector<Mask> masks;
  std::vector<double> weights;
};

Design Enumerate(size_t d) {
  Design out;
  const uint64_t total = uint64_t{1} << d;
  for (uint64_t bits = 1; bits + 1 < total; ++bits) {
    Mask m(d);
    size_t s = 0;
    for (size_t i = 0; i < d; ++i) {
      m[i] = (bits >> i) & 1;
      s += m[i];
    }
    const double w = static_cast<double>(d - 1) /
                     (std::exp(LogChoose(d, s)) * static_cast<double>(s) *
                      static_cast<double>(d - s));
    out.masks.push_back(std::move(m));
    out.weights.push_back(w);
  }
  return out;
}

Design Sample(size_t d, size_t n_coalitions, Rng& rng) {
  // Kernel mass per coalition size is proportional to (d-1) / (s (d-s)).
  std::vector<double> cumulative(d, 0.0);
  double acc = 0.0;
  for (size_t s = 1; s < d; ++s) {
    acc += static_cast<double>(d - 1) / (static_cast<double>(s) * static_cast<double>(d - s));
    cumulative[s] = acc;
  }
  std::map<Mask, double> counts;
  const size_t pairs = std::max<size_t>(1, (n_coalitions - 2) / 2);
  for (size_t p = 0; p < pairs; ++p) {
    const double u = rng.Uniform() * acc;
    size_t s = 1;
    while (s + 1 < d && cumulative[s] <= u) ++s;
    Mask m(d, 0);
    for (size_t i : rng.SampleWithoutReplacement(d, s)) m[i] = 1;
    Mask complement(d);
    for (size_t i = 0; i < d; ++i) complement[i] = 1 - m[i];
    counts[m] += 1.0;
    counts[complement] += 1.0;
  }
  Design out;
  for (auto& [mask, w] : counts) {
    out.masks.push_back(mask);
    out.weights.push_back(w);
  }
  return out;
}

// Solves the constrained regression; returns false when the design is rank
// deficient.
bool Solve(const Design& design, const std::vector<double>& values, double base, double delta,
           size_t d, std::vector<double>& phi) {
  const size_t n = design.masks.size();
  const size_t k = d - 1;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (size_t r = 0; r < n; ++r) {
    const Mask& m = design.masks[r];
    const double sw = std::sqrt(design.weights[r]);
    const auto ri = static_cast<Eigen::Index>(r);
    for (size_t c = 0; c < k; ++c) {
      a(ri, static_cast<Eigen::Index>(c)) = sw * (static_cast<double>(m[c]) - m[d - 1]);
    }
    b(ri) = sw * (values[r] - base - m[d - 1] * delta);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(k)) return false;
  const Eigen::VectorXd x = qr.solve(b);
  phi.assign(d, 0.0);
  double sum = 0.0;
  for (size_t c = 0; c < k; ++c) {
    phi[c] = x(static_cast<Eigen::Index>(c));
    sum += phi[c];
  }
  phi[d - 1] = delta - sum;
  return true;
}

}  // namespace

ShapValues ExactShapley(const Scorer& f, std::span<const double> row,
                        const features::DenseMatrix& background) {
  CheckInputs(row, background);
  const size_t d = row.size();
  if (d > kMaxExactFeatures) {
    throw Error(ErrorCode::kSize, "exact Shapley supports at most 20 features (got " +
                                      std::to_string(d) + "); use the kernel method");
  }
  const uint64_t total = uint64_t{1} << d;
  std::vector<double> v(total);
  std::vector<double> scratch(d);
  Mask mask(d);
  for (uint64_t bits = 0; bits < total; ++bits) {
    for (size_t i = 0; i < d; ++i) mask[i] = (bits >> i) & 1;
    v[bits] = CoalitionValue(f, row, background, mask, scratch);
  }
  // weight(s) = s! (d-s-1)! / d!
  std::vector<double> weight(d, 0.0);
  for (size_t s = 0; s < d; ++s) {
    weight[s] = std::exp(std::lgamma(static_cast<double>(s) + 1) +
                         std::lgamma(static_cast<double>(d - s)) -
                         std::lgamma(static_cast<double>(d) + 1));
  }
  ShapValues out;
  out.base_value = v[0];
  out.output = v[total - 1];
  out.phi.assign(d, 0.0);
  for (uint64_t bits = 0; bits < total; ++bits) {
    const size_t s = static_cast<size_t>(__builtin_popcountll(bits));
    for (size_t i = 0; i < d; ++i) {
      if ((bits >> i) & 1) continue;
      out.phi[i] += weight[s] * (v[bits | (uint64_t{1} << i)] - v[bits]);
    }
  }
  return out;
}

size_t DefaultCoalitions(size_t d) {
  const size_t n = 2 * d + 2048;
  if (d < 63 && (uint64_t{1} << d) < n) return static_cast<size_t>(uint64_t{1} << d);
  return n;
}

ShapValues KernelShap(const Scorer& f, std::span<const double> row,
                      const features::DenseMatrix& background, size_t n_coalitions,
                      uint64_t seed) {
  CheckInputs(row, background);
  const size_t d = row.size();
  const bool enumerate = d < 63 && n_coalitions >= (uint64_t{1} << d);
  if (!enumerate && n_coalitions < d + 2) {
    throw Error(ErrorCode::kSize, "kernel SHAP needs at least d + 2 coalitions");
  }
  std::vector<double> scratch(d);
  ShapValues out;
  out.base_value = CoalitionValue(f, row, background, Mask(d, 0), scratch);
  out.output = f(row);
  const double delta = out.output - out.base_value;
  if (d == 0) return out;
  if (d == 1) {
    out.phi = {delta};
    return out;
  }
  Rng rng(DeriveSeed(seed, "kernel-shap"));
  size_t budget = n_coalitions;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Design design = enumerate ? Enumerate(d) : Sample(d, budget, rng);
    std::vector<double> values(design.masks.size());
    for (size_t r = 0; r < design.masks.size(); ++r) {
      values[r] = CoalitionValue(f, row, background, design.masks[r], scratch);
    }
    if (Solve(design, values, out.base_value, delta, d, out.phi)) return out;
    if (enumerate) break;
    budget *= 2;
  }
  throw Error(ErrorCode::kDegenerate, "kernel SHAP regression is rank deficient");
}

features::DenseMatrix SelectBackground(const features::DenseMatrix& rows, size_t n,
                                       uint64_t seed) {
  if (n >= rows.rows) return rows;
  Rng rng(DeriveSeed(seed, "background"));
  std::vector<size_t> picked = rng.SampleWithoutReplacement(rows.rows, n);
  std::sort(picked.begin(), picked.end());
  features::DenseMatrix out(n, rows.cols);
  for (size_t i = 0; i < n; ++i) {
    std::copy(rows.row(picked[i]).begin(), rows.row(picked[i]).end(), out.row(i).begin());
  }
  return out;
}

std::vector<Explanation> ExplainRows(const Scorer& f, const features::DenseMatrix& rows,
                                     std::span<const std::string> row_ids,
                                     std::span<const std::string> feature_names,
                                     const features::DenseMatrix& background,
                                     const ExplainOptions& options) {
  if (row_ids.size() != rows.rows || feature_names.size() != rows.cols) {
    throw Error(ErrorCode::kShape, "row ids or feature names do not match the matrix");
  }
  const size_t n_coal =
      options.n_coalitions == 0 ? DefaultCoalitions(rows.cols) : options.n_coalitions;
  std::vector<Explanation> out(rows.rows);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (options.execution == Execution::kParallel)
  for (size_t r = 0; r < rows.rows; ++r) {
    try {
      ShapValues v = KernelShap(f, rows.row(r), background, n_coal,
                                DeriveSeed(options.seed, static_cast<uint64_t>(r)));
      Explanation& e = out[r];
      e.admission_id = row_ids[r];
      e.features.assign(feature_names.begin(), feature_names.end());
      e.base_value = v.base_value;
      e.output = v.output;
      e.phi = std::move(v.phi);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace phenoid::shap
