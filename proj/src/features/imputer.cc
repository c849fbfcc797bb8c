#include "phenoid/features/imputer.h"

#include <cmath>

#include "phenoid/common/error.h"

namespace phenoid::features {

Imputer Imputer::Fit(const FeatureMatrix& train) {
  if (train.rows() == 0) throw Error(ErrorCode::kFit, "cannot fit imputer on zero rows");
  Imputer imp;
  for (size_t c = 0; c < train.cols(); ++c) {
    if (train.kinds()[c] != ColumnKind::kStructured) continue;
    double sum = 0.0;
    size_t n = 0;
    for (size_t r = 0; r < train.rows(); ++r) {
      if (train.missing(r, c)) continue;
      sum += train.at(r, c);
      ++n;
    }
    ColumnStats s;
    bool zero_var = false;
    if (n == 0) {
      s.mean = 0.0;
      s.stddev = 1.0;
    } else {
      s.mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (size_t r = 0; r < train.rows(); ++r) {
        if (train.missing(r, c)) continue;
        const double d = train.at(r, c) - s.mean;
        ss += d * d;
      }
      s.stddev = std::sqrt(ss / static_cast<double>(n));
      if (s.stddev == 0.0) {
        zero_var = true;
        s.stddev = 1.0;
      }
    }
    imp.stats_[train.column_names()[c]] = s;
    imp.zero_variance_[train.column_names()[c]] = zero_var;
  }
  return imp;
}

void Imputer::ApplyRow(std::span<const std::string> columns, std::span<double> values,
                       std::span<const uint8_t> missing, bool standardize) const {
  for (size_t c = 0; c < columns.size(); ++c) {
    auto it = stats_.find(columns[c]);
    if (it == stats_.end()) continue;
    const ColumnStats& s = it->second;
    double v = (!missing.empty() && missing[c]) ? s.mean : values[c];
    if (standardize) {
      v = zero_variance_.at(columns[c]) ? 0.0 : (v - s.mean) / s.stddev;
    }
    values[c] = v;
  }
}

FeatureMatrix Imputer::Apply(const FeatureMatrix& m, bool standardize) const {
  FeatureMatrix out(m.column_names(), m.kinds(), m.row_ids());
  std::vector<double> row(m.cols());
  std::vector<uint8_t> miss(m.cols());
  for (size_t r = 0; r < m.rows(); ++r) {
    for (size_t c = 0; c < m.cols(); ++c) {
      row[c] = m.at(r, c);
      miss[c] = m.missing(r, c) ? 1 : 0;
    }
    ApplyRow(m.column_names(), row, miss, standardize);
    for (size_t c = 0; c < m.cols(); ++c) {
      if (miss[c] && !stats_.count(m.column_names()[c])) {
        throw Error(ErrorCode::kData,
                    "missing cell in column " + m.column_names()[c] + " the imputer never saw");
      }
      out.Set(r, c, row[c]);
    }
  }
  return out;
}

nlohmann::json Imputer::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, s] : stats_) {
    j[name] = {{"mean", s.mean}, {"stddev", s.stddev}, {"zero_variance", zero_variance_.at(name)}};
  }
  return j;
}

Imputer Imputer::FromJson(const nlohmann::json& j) {
  Imputer imp;
  for (const auto& [name, v] : j.items()) {
    imp.stats_[name] = {v.at("mean").get<double>(), v.at("stddev").get<double>()};
    imp.zero_variance_[name] = v.value("zero_variance", false);
  }
  return imp;
}

}  // namespace phenoid::features
