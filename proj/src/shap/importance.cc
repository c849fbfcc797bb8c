#include "phenoid/shap/importance.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::shap {

namespace {

Direction Classify(size_t positive, size_t negative) {
  if (positive > 0 && negative > 0) return Direction::kMixed;
  if (positive > 0) return Direction::kPositive;
  if (negative > 0) return Direction::kNegative;
  return Direction::kZero;
}

void Rank(std::vector<FeatureImportance>& v) {
  std::sort(v.begin(), v.end(), [](const FeatureImportance& a, const FeatureImportance& b) {
    if (a.mean_abs != b.mean_abs) return a.mean_abs > b.mean_abs;
    return a.feature < b.feature;
  });
}

}  // namespace

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kPositive: return "positive";
    case Direction::kNegative: return "negative";
    case Direction::kMixed: return "mixed";
    case Direction::kZero: return "zero";
  }
  return "?";
}

std::vector<std::string> GlobalImportance::TopFeatures(size_t m) const {
  std::vector<std::string> out;
  for (size_t i = 0; i < ranked.size() && i < m; ++i) out.push_back(ranked[i].feature);
  return out;
}

nlohmann::json GlobalImportance::ToJson() const {
  nlohmann::json features = nlohmann::json::array();
  for (const FeatureImportance& f : ranked) {
    features.push_back({{"feature", f.feature},
                        {"mean_abs_phi", f.mean_abs},
                        {"mean_phi", f.mean_phi},
                        {"positive", f.positive},
                        {"negative", f.negative},
                        {"direction", DirectionName(f.direction)}});
  }
  return {{"n_explanations", n_explanations}, {"features", features}};
}

GlobalImportance ComputeGlobalImportance(const std::vector<Explanation>& explanations) {
  if (explanations.empty()) throw Error(ErrorCode::kMask, "no explanations to summarize");
  const std::vector<std::string>& names = explanations.front().features;
  for (const Explanation& e : explanations) {
    if (e.features != names) throw Error(ErrorCode::kMask, "explanations use different masks");
  }
  GlobalImportance out;
  out.n_explanations = explanations.size();
  const double n = static_cast<double>(explanations.size());
  for (size_t i = 0; i < names.size(); ++i) {
    FeatureImportance fi;
    fi.feature = names[i];
    for (const Explanation& e : explanations) {
      fi.mean_abs += std::abs(e.phi[i]);
      fi.mean_phi += e.phi[i];
      if (e.phi[i] > 0) ++fi.positive;
      if (e.phi[i] < 0) ++fi.negative;
    }
    fi.mean_abs /= n;
    fi.mean_phi /= n;
    fi.direction = Classify(fi.positive, fi.negative);
    out.ranked.push_back(std::move(fi));
  }
  Rank(out.ranked);
  return out;
}

GlobalImportance MergeImportance(const GlobalImportance& a, const GlobalImportance& b) {
  auto names = [](const GlobalImportance& g) {
    std::vector<std::string> v;
    for (const auto& f : g.ranked) v.push_back(f.feature);
    std::sort(v.begin(), v.end());
    return v;
  };
  if (names(a) != names(b)) throw Error(ErrorCode::kMask, "importance sets use different masks");
  std::map<std::string, const FeatureImportance*> other;
  for (const auto& f : b.ranked) other[f.feature] = &f;
  const double na = static_cast<double>(a.n_explanations);
  const double nb = static_cast<double>(b.n_explanations);
  GlobalImportance out;
  out.n_explanations = a.n_explanations + b.n_explanations;
  for (const FeatureImportance& fa : a.ranked) {
    const FeatureImportance& fb = *other[fa.feature];
    FeatureImportance f;
    f.feature = fa.feature;
    f.mean_abs = (fa.mean_abs * na + fb.mean_abs * nb) / (na + nb);
    f.mean_phi = (fa.mean_phi * na + fb.mean_phi * nb) / (na + nb);
    f.positive = fa.positive + fb.positive;
    f.negative = fa.negative + fb.negative;
    f.direction = Classify(f.positive, f.negative);
    out.ranked.push_back(std::move(f));
  }
  Rank(out.ranked);
  return out;
}

std::string ExportBeeswarm(const std::vector<Explanation>& explanations,
                           const features::FeatureMatrix& raw) {
  const GlobalImportance importance = ComputeGlobalImportance(explanations);
  const std::vector<std::string>& names = explanations.front().features;
  std::string out = "feature,admission_id,phi,value\n";
  for (const FeatureImportance& fi : importance.ranked) {
    const size_t i = static_cast<size_t>(
        std::find(names.begin(), names.end(), fi.feature) - names.begin());
    const auto col = raw.ColumnIndex(fi.feature);
    for (const Explanation& e : explanations) {
      std::string value;
      const auto row = raw.RowIndex(e.admission_id);
      if (col && row && !raw.missing(*row, *col)) value = FormatDouble(raw.at(*row, *col));
      out += fi.feature + "," + e.admission_id + "," + FormatDouble(e.phi[i]) + "," + value + "\n";
    }
  }
  return out;
}

std::vector<WaterfallStep> Waterfall(const Explanation& e) {
  std::vector<size_t> order(e.features.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const double pa = std::abs(e.phi[a]), pb = std::abs(e.phi[b]);
    if (pa != pb) return pa > pb;
    return e.features[a] < e.features[b];
  });
  std::vector<WaterfallStep> steps;
  double running = e.base_value;
  for (size_t i : order) {
    running += e.phi[i];
    steps.push_back({e.features[i], e.phi[i], running});
  }
  return steps;
}

std::string ExportWaterfall(const Explanation& e) {
  std::string out = "feature,phi,cumulative\n";
  out += "(base)," + FormatDouble(0.0) + "," + FormatDouble(e.base_value) + "\n";
  for (const WaterfallStep& s : Waterfall(e)) {
    out += s.feature + "," + FormatDouble(s.phi) + "," + FormatDouble(s.cumulative) + "\n";
  }
  return out;
}

nlohmann::json ExplanationToJson(const Explanation& e) {
  nlohmann::json steps = nlohmann::json::array();
  for (const WaterfallStep& s : Waterfall(e)) {
    steps.push_back({{"feature", s.feature}, {"phi", s.phi}, {"cumulative", s.cumulative}});
  }
  return {{"admission_id", e.admission_id},
          {"base_value", e.base_value},
          {"output", e.output},
          {"waterfall", steps}};
}

}  // namespace phenoid::shap
