#ifndef PHENOID_SYNTH_ORACLE_H_
#define PHENOID_SYNTH_ORACLE_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "phenoid/synth/generator.h"
#include "phenoid/synth/profile.h"

namespace phenoid::synth {

enum class FeatureVerdict { kRelevant, kIrrelevant };

std::string_view FeatureVerdictName(FeatureVerdict v);
FeatureVerdict ParseFeatureVerdict(std::string_view s);

// true_label of the admission; unknown id -> Error(kLookup).
bool OracleDiagnosis(const GroundTruth& gt, const std::string& admission_id);

// Relevant iff the feature is one of the profile's positive phenotypes or a
// structured feature the profile shifts for positives.
FeatureVerdict OracleFeatureVerdict(const DiseaseProfile& profile, std::string_view feature_name);

// Simulated clinician panel. With noise > 0 each diagnosis is flipped with
// that probability, decided by a hash of (seed, admission id) so repeated
// queries agree.
class SimulatedClinician {
 public:
  SimulatedClinician(GroundTruth truth, DiseaseProfile profile, double noise = 0.0,
                     uint64_t seed = 0);

  bool Diagnose(const std::string& admission_id) const;
  FeatureVerdict JudgeFeature(std::string_view feature_name) const;

  const GroundTruth& truth() const { return truth_; }
  const DiseaseProfile& profile() const { return profile_; }

 private:
  GroundTruth truth_;
  DiseaseProfile profile_;
  double noise_;
  uint64_t seed_;
};

}  // namespace phenoid::synth

#endif  // PHENOID_SYNTH_ORACLE_H_
