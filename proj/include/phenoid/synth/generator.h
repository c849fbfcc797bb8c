#ifndef PHENOID_SYNTH_GENERATOR_H_
#define PHENOID_SYNTH_GENERATOR_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "phenoid/corpus/admission.h"
#include "phenoid/corpus/catalog.h"
#include "phenoid/hpo/matcher.h"
#include "phenoid/synth/profile.h"

namespace phenoid::synth {

struct TruthRecord {
  bool true_label = false;
  std::set<std::string> emitted_phenotypes;  // affirmed mentions only
  bool miscoded = false;

  bool operator==(const TruthRecord&) const = default;
};

struct GroundTruth {
  std::map<std::string, TruthRecord> records;

  const TruthRecord& Get(const std::string& admission_id) const;
};

std::string SerializeGroundTruth(const GroundTruth& gt);
GroundTruth ParseGroundTruth(std::string_view text);

struct FeatureDistribution {
  double mean = 0.0;
  double stddev = 1.0;
  double missing_rate = 0.15;
  bool integer_valued = false;
};

// Canonical-unit Gaussians for the default catalog keys.
std::map<std::string, FeatureDistribution> DefaultFeatureDistributions();

struct GeneratedCorpus {
  std::vector<corpus::EhrAdmission> admissions;
  GroundTruth truth;
};

// Deterministic in (profile, n_admissions, prevalence, seed). Phenotype
// sentences use the matcher's own surface forms, so every affirmed mention is
// recoverable by an extractor built from the same matcher.
// Errors: n < 1, prevalence outside (0, 1) or prevalence * n < 1 -> kConfig.
GeneratedCorpus GenerateCorpus(const DiseaseProfile& profile, int n_admissions, double prevalence,
                               uint64_t seed, const hpo::Matcher& matcher,
                               const corpus::StructuredFeatureCatalog& catalog);

}  // namespace phenoid::synth

#endif  // PHENOID_SYNTH_GENERATOR_H_
