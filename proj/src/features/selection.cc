#include "phenoid/features/selection.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "phenoid/common/error.h"

namespace phenoid::features {

namespace {

constexpr int kQuantileBins = 10;

// Bin index per row; -1 marks missing.
std::vector<int> BinColumn(const FeatureMatrix& m, size_t column) {
  std::vector<int> bins(m.rows(), -1);
  if (m.kinds()[column] == ColumnKind::kPhenotype) {
    for (size_t r = 0; r < m.rows(); ++r) bins[r] = m.at(r, column) != 0.0 ? 1 : 0;
    return bins;
  }
  std::vector<double> sorted;
  for (size_t r = 0; r < m.rows(); ++r) {
    if (!m.missing(r, column)) sorted.push_back(m.at(r, column));
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  for (int j = 1; j < kQuantileBins && !sorted.empty(); ++j) {
    double cut = sorted[(static_cast<size_t>(j) * sorted.size()) / kQuantileBins];
    if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
  }
  for (size_t r = 0; r < m.rows(); ++r) {
    if (m.missing(r, column)) continue;
    const double v = m.at(r, column);
    bins[r] = static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
  }
  return bins;
}

void CheckLabels(const FeatureMatrix& m, std::span<const int> labels) {
  if (labels.size() != m.rows()) {
    throw Error(ErrorCode::kShape, "labels do not align with matrix rows");
  }
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::kSelection, "constant labels carry no signal for feature selection");
  }
}

}  // namespace

double MutualInformationScore(const FeatureMatrix& m, size_t column, std::span<const int> labels) {
  std::vector<int> bins = BinColumn(m, column);
  // Key -1 (missing) sorts first; iteration order is fixed by the map.
  std::map<int, std::array<long, 2>> joint;
  long n1 = 0;
  for (size_t r = 0; r < bins.size(); ++r) {
    joint[bins[r]][labels[r] != 0 ? 1 : 0] += 1;
    n1 += labels[r] != 0 ? 1 : 0;
  }
  const double n = static_cast<double>(bins.size());
  const double py[2] = {(n - static_cast<double>(n1)) / n, static_cast<double>(n1) / n};
  double mi = 0.0;
  for (const auto& [bin, counts] : joint) {
    const double pb = static_cast<double>(counts[0] + counts[1]) / n;
    for (int y = 0; y < 2; ++y) {
      if (counts[y] == 0) continue;
      const double pj = static_cast<double>(counts[y]) / n;
      mi += pj * std::log(pj / (pb * py[y]));
    }
  }
  return std::max(0.0, mi);
}

double AbsPointBiserialScore(const FeatureMatrix& m, size_t column, std::span<const int> labels) {
  // Values are sorted before summation so the score does not depend on row order.
  std::vector<double> all, pos;
  for (size_t r = 0; r < m.rows(); ++r) {
    if (m.missing(r, column)) continue;
    all.push_back(m.at(r, column));
    if (labels[r] != 0) pos.push_back(m.at(r, column));
  }
  if (all.size() < 2 || pos.empty() || pos.size() == all.size()) return 0.0;
  std::sort(all.begin(), all.end());
  std::sort(pos.begin(), pos.end());
  const double n = static_cast<double>(all.size());
  double sum_all = 0.0;
  for (double v : all) sum_all += v;
  double sum_pos = 0.0;
  for (double v : pos) sum_pos += v;
  const double mean = sum_all / n;
  double ss = 0.0;
  for (double v : all) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (sd == 0.0) return 0.0;
  const double n1 = static_cast<double>(pos.size());
  const double n0 = n - n1;
  const double mean1 = sum_pos / n1;
  const double mean0 = (sum_all - sum_pos) / n0;
  const double r = (mean1 - mean0) / sd * std::sqrt(n1 * n0 / (n * n));
  return std::min(1.0, std::abs(r));
}

std::vector<ScoredColumn> ScoreColumns(const FeatureMatrix& m, std::span<const int> labels,
                                       SelectionMethod method,
                                       std::span<const std::string> restrict_to) {
  CheckLabels(m, labels);
  std::vector<ScoredColumn> scored;
  for (size_t c = 0; c < m.cols(); ++c) {
    const std::string& name = m.column_names()[c];
    if (!restrict_to.empty() &&
        std::find(restrict_to.begin(), restrict_to.end(), name) == restrict_to.end()) {
      continue;
    }
    const double s = method == SelectionMethod::kMutualInformation
                         ? MutualInformationScore(m, c, labels)
                         : AbsPointBiserialScore(m, c, labels);
    scored.push_back({name, s});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredColumn& a, const ScoredColumn& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.name < b.name;
  });
  return scored;
}

FeatureMask SelectTopK(const FeatureMatrix& m, std::span<const int> labels, size_t k,
                       SelectionMethod method, std::span<const std::string> restrict_to) {
  if (k == 0) throw Error(ErrorCode::kSelection, "k must be >= 1");
  std::vector<ScoredColumn> scored = ScoreColumns(m, labels, method, restrict_to);
  if (scored.size() > k) scored.resize(k);
  FeatureMask mask;
  for (const std::string& name : m.column_names()) {
    if (std::any_of(scored.begin(), scored.end(),
                    [&](const ScoredColumn& s) { return s.name == name; })) {
      mask.active.push_back(name);
    }
  }
  return mask;
}

}  // namespace phenoid::features
