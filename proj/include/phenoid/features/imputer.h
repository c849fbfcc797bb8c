#ifndef PHENOID_FEATURES_IMPUTER_H_
#define PHENOID_FEATURES_IMPUTER_H_

#include <map>
#include <string>

#include "json.hpp"
#include "phenoid/features/matrix.h"

namespace phenoid::features {

struct ColumnStats {
  double mean = 0.0;    // imputation value and standardization center
  double stddev = 1.0;  // population stddev of observed training values
};

// Per structured column training statistics. Phenotype columns are left as is.
class Imputer {
 public:
  // Fit on training rows only. Zero rows -> Error(kFit).
  static Imputer Fit(const FeatureMatrix& train);

  // Missing structured cells <- training mean (0 for columns never observed),
  // then structured columns z-scored when `standardize`. A zero-stddev
  // column standardizes to 0.
  FeatureMatrix Apply(const FeatureMatrix& m, bool standardize = true) const;
  // Same transform on one raw row laid out as `columns`.
  void ApplyRow(std::span<const std::string> columns, std::span<double> values,
                std::span<const uint8_t> missing, bool standardize = true) const;

  const std::map<std::string, ColumnStats>& stats() const { return stats_; }

  nlohmann::json ToJson() const;
  static Imputer FromJson(const nlohmann::json& j);

 private:
  std::map<std::string, ColumnStats> stats_;
  std::map<std::string, bool> zero_variance_;
};

}  // namespace phenoid::features

#endif  // PHENOID_FEATURES_IMPUTER_H_
