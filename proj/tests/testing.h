#ifndef PHENOID_TESTS_TESTING_H_
#define PHENOID_TESTS_TESTING_H_

// Independent reference implementations used as test oracles, plus small
// fixtures shared across suites. Nothing here calls into the code under test
// except to build inputs.

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phenoid/corpus/admission.h"
#include "phenoid/features/matrix.h"
#include "phenoid/synth/generator.h"

namespace phenoid::testing {

// Probability that a random positive outranks a random negative, ties 1/2,
// by direct enumeration of all pairs.
double BruteForceAuc(std::span<const int> y, std::span<const double> s);

// Average precision: for every distinct score cut point, precision at that
// cut times the recall gained, summing over cut points from high to low.
double BruteForceAveragePrecision(std::span<const int> y, std::span<const double> s);

// Shapley values by the permutation definition: average marginal
// contribution over all d! orderings, with the interventional value function
// v(S) = mean over background of f(x_S, b_{not S}).
std::vector<double> PermutationShapley(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> row,
                                       const features::DenseMatrix& background);

// A random scorer over d inputs for Shapley checks. Kinds: 0 linear with some
// zero weights, 1 axis-aligned tree of depth <= 3, 2 nonlinear function of a
// random feature subset. `dummies` lists inputs the scorer never reads.
struct RandomModel {
  std::string kind;
  std::function<double(std::span<const double>)> f;
  std::vector<size_t> dummies;
};
RandomModel MakeRandomModel(size_t d, int kind, uint64_t seed);

// Random (labels, scores) pair with both classes present; scores are drawn on
// a coarse grid half the time so that ties occur.
void RandomScoredLabels(size_t n, uint64_t seed, std::vector<int>& y, std::vector<double>& s);

// Hyperband schedule written out from the textbook recurrence: bracket s
// starts ceil((s_max + 1) / (s + 1) * eta^s) configs at resource eta^-s and
// keeps the best floor(n / eta), at least one, per rung. Cost is measured in
// units of R-th of a full fit.
struct BracketPlan {
  int s = 0;
  std::vector<int> sizes;
  std::vector<double> resources;
  double cost = 0.0;
};
std::vector<BracketPlan> HyperbandPlan(int max_resource, int eta);

// Fresh empty directory under the system temp path, unique per call.
std::filesystem::path TempDir(const std::string& tag);

// An admission with the given codes and no note or observations.
corpus::EhrAdmission Admission(const std::string& id, const std::string& patient,
                               const std::vector<std::string>& codes);

// Shipped Cachexia profile rendered into a synthetic corpus.
synth::GeneratedCorpus CachexiaCorpus(int n, double prevalence, uint64_t seed);

// Dense rows plus the matching FeatureMatrix with generic column names.
features::FeatureMatrix MatrixFrom(const std::vector<std::vector<double>>& rows);

}  // namespace phenoid::testing

#endif  // PHENOID_TESTS_TESTING_H_
