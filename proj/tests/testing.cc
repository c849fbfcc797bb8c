#include "testing.h"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <numeric>
#include <set>

#include <unistd.h>

#include "phenoid/common/rng.h"
#include "phenoid/hpo/extractor.h"
#include "phenoid/synth/profile.h"

namespace phenoid::testing {

double BruteForceAuc(std::span<const int> y, std::span<const double> s) {
  double wins = 0.0;
  double pairs = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    for (size_t j = 0; j < y.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

double BruteForceAveragePrecision(std::span<const int> y, std::span<const double> s) {
  const std::set<double, std::greater<>> cuts(s.begin(), s.end());
  double total_pos = 0.0;
  for (int v : y) total_pos += v;
  double ap = 0.0;
  double prev_recall = 0.0;
  for (double cut : cuts) {
    double tp = 0.0;
    double predicted = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
      if (s[i] >= cut) {
        predicted += 1.0;
        tp += y[i];
      }
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / predicted);
    prev_recall = recall;
  }
  return ap;
}

std::vector<double> PermutationShapley(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> row,
                                       const features::DenseMatrix& background) {
  const size_t d = row.size();
  auto value = [&](const std::vector<bool>& in) {
    double sum = 0.0;
    std::vector<double> x(d);
    for (size_t b = 0; b < background.rows; ++b) {
      for (size_t j = 0; j < d; ++j) x[j] = in[j] ? row[j] : background.at(b, j);
      sum += f(x);
    }
    return sum / static_cast<double>(background.rows);
  };
  std::vector<size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(d, 0.0);
  double count = 0.0;
  do {
    std::vector<bool> in(d, false);
    double prev = value(in);
    for (size_t j : order) {
      in[j] = true;
      const double next = value(in);
      phi[j] += next - prev;
      prev = next;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= count;
  return phi;
}

RandomModel MakeRandomModel(size_t d, int kind, uint64_t seed) {
  Rng rng(seed);
  std::vector<bool> used(d, false);
  RandomModel out;
  if (kind == 0) {
    out.kind = "linear";
    std::vector<double> w(d);
    for (size_t j = 0; j < d; ++j) {
      w[j] = rng.Bernoulli(0.25) ? 0.0 : rng.Normal(0, 2);
      used[j] = w[j] != 0.0;
    }
    const double b = rng.Normal(0, 1);
    out.f = [w, b](std::span<const double> x) {
      double z = b;
      for (size_t j = 0; j < w.size(); ++j) z += w[j] * x[j];
      return z;
    };
  } else if (kind == 1) {
    out.kind = "tree";
    // Complete binary tree of depth 3 stored heap-style; leaves at 7..14.
    std::vector<size_t> feat(7);
    std::vector<double> thr(7), leaf(8);
    for (size_t k = 0; k < 7; ++k) {
      feat[k] = static_cast<size_t>(rng.Index(d));
      thr[k] = rng.Normal(0, 1);
      used[feat[k]] = true;
    }
    for (double& v : leaf) v = rng.Normal(0, 1);
    out.f = [feat, thr, leaf](std::span<const double> x) {
      size_t k = 0;
      while (k < 7) k = x[feat[k]] <= thr[k] ? 2 * k + 1 : 2 * k + 2;
      return leaf[k - 7];
    };
  } else {
    out.kind = "masked";
    std::vector<size_t> subset;
    for (size_t j = 0; j < d; ++j) {
      if (rng.Bernoulli(0.6)) subset.push_back(j);
    }
    if (subset.empty()) subset.push_back(0);
    for (size_t j : subset) used[j] = true;
    std::vector<double> w(subset.size());
    for (double& v : w) v = rng.Normal(0, 1.5);
    out.f = [subset, w](std::span<const double> x) {
      double z = 0.0, prod = 1.0;
      for (size_t i = 0; i < subset.size(); ++i) {
        z += w[i] * x[subset[i]];
        prod *= std::tanh(x[subset[i]]);
      }
      return 1.0 / (1.0 + std::exp(-z)) + prod;
    };
  }
  for (size_t j = 0; j < d; ++j) {
    if (!used[j]) out.dummies.push_back(j);
  }
  return out;
}

void RandomScoredLabels(size_t n, uint64_t seed, std::vector<int>& y, std::vector<double>& s) {
  Rng rng(seed);
  const bool coarse = rng.Bernoulli(0.5);
  const double prevalence = rng.Uniform(0.05, 0.95);
  y.assign(n, 0);
  s.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    y[i] = rng.Bernoulli(prevalence);
    const double raw = rng.Normal(y[i] * rng.Uniform(0, 2), 1.0);
    s[i] = coarse ? std::round(raw * 2.0) / 2.0 : raw;
  }
  y[0] = 1;
  y[n - 1] = 0;
}

std::vector<BracketPlan> HyperbandPlan(int max_resource, int eta) {
  const int s_max =
      static_cast<int>(std::floor(std::log(max_resource) / std::log(eta) + 1e-9));
  std::vector<BracketPlan> plan;
  for (int s = s_max; s >= 0; --s) {
    BracketPlan b;
    b.s = s;
    int n = static_cast<int>(
        std::ceil(static_cast<double>(s_max + 1) / (s + 1) * std::pow(eta, s) - 1e-9));
    for (int i = 0; i <= s; ++i) {
      const double r = std::pow(eta, i - s);
      b.sizes.push_back(n);
      b.resources.push_back(r);
      b.cost += n * r * max_resource;
      n = std::max(1, n / eta);
    }
    plan.push_back(b);
  }
  return plan;
}

std::filesystem::path TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("phenoid-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

corpus::EhrAdmission Admission(const std::string& id, const std::string& patient,
                               const std::vector<std::string>& codes) {
  corpus::EhrAdmission a;
  a.admission_id = id;
  a.patient_id = patient;
  for (const std::string& c : codes) a.icd_codes.insert(corpus::IcdCode::Parse(c));
  return a;
}

synth::GeneratedCorpus CachexiaCorpus(int n, double prevalence, uint64_t seed) {
  static const auto extractor = hpo::LoadDefaultExtractor();
  return synth::GenerateCorpus(synth::LoadShippedProfile("cachexia"), n, prevalence, seed,
                               extractor->matcher(),
                               corpus::StructuredFeatureCatalog::Default());
}

features::FeatureMatrix MatrixFrom(const std::vector<std::vector<double>>& rows) {
  const size_t d = rows.empty() ? 0 : rows[0].size();
  std::vector<std::string> names;
  std::vector<features::ColumnKind> kinds;
  for (size_t j = 0; j < d; ++j) {
    names.push_back("x" + std::to_string(j));
    kinds.push_back(features::ColumnKind::kStructured);
  }
  std::vector<std::string> ids;
  for (size_t i = 0; i < rows.size(); ++i) ids.push_back("r" + std::to_string(i));
  features::FeatureMatrix m(names, kinds, ids);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < d; ++j) m.Set(i, j, rows[i][j]);
  }
  return m;
}

}  // namespace phenoid::testing
