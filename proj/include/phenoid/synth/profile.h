#ifndef PHENOID_SYNTH_PROFILE_H_
#define PHENOID_SYNTH_PROFILE_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace phenoid::synth {

struct PhenotypeEmission {
  std::string hpo_id;
  double p = 0.0;
};

// A phenotype that is clinically irrelevant to the disease. It may still be
// correlated with it: p_positive is its emission rate among true positives.
struct DistractorEmission {
  std::string hpo_id;
  double p_negative = 0.0;
  double p_positive = 0.0;
};

struct DiseaseProfile {
  std::string disease;
  // Built-in criteria name or a code rule accepted by CodePredicate::Parse.
  std::string criteria;
  std::vector<PhenotypeEmission> positive_phenotypes;
  std::vector<DistractorEmission> distractor_phenotypes;
  // Label-independent background phenotypes (comorbidities).
  std::vector<PhenotypeEmission> common_phenotypes;
  // Mean offset (canonical units) applied to positives' structured values.
  std::map<std::string, double> structured_shift;
  std::vector<std::string> icd_positive_codes;
  // Codes satisfying the criteria's background predicate, if it has one.
  // True positives always carry one; negatives with background_rate.
  std::vector<std::string> background_codes;
  double background_rate = 0.0;
  std::vector<std::string> filler_codes;
  double miscode_fn_rate = 0.20;
  double miscode_fp_rate = 0.05;
  double negated_mention_rate = 0.3;
  double alias_unit_rate = 0.3;
  double implausible_value_rate = 0.01;
  double repeat_patient_rate = 0.2;

  // Probabilities in [0, 1], codes well-formed, positive and distractor sets
  // disjoint. Throws Error(kConfig).
  void Validate() const;
  bool IsPositivePhenotype(std::string_view hpo_id) const;
  bool IsDistractor(std::string_view hpo_id) const;
};

DiseaseProfile ParseProfile(std::string_view json_text);
DiseaseProfile LoadProfile(const std::string& path);
std::string SerializeProfile(const DiseaseProfile& profile);

// Shipped profile for a disease name ("Cancer Cachexia", "lung", ...).
DiseaseProfile LoadShippedProfile(std::string_view disease);

}  // namespace phenoid::synth

#endif  // PHENOID_SYNTH_PROFILE_H_
