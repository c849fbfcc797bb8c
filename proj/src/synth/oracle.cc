#include "phenoid/synth/oracle.h"

#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"

namespace phenoid::synth {

std::string_view FeatureVerdictName(FeatureVerdict v) {
  return v == FeatureVerdict::kRelevant ? "Relevant" : "Irrelevant";
}

FeatureVerdict ParseFeatureVerdict(std::string_view s) {
  if (s == "Relevant" || s == "relevant") return FeatureVerdict::kRelevant;
  if (s == "Irrelevant" || s == "irrelevant") return FeatureVerdict::kIrrelevant;
  throw Error(ErrorCode::kValidation, "verdict must be Relevant or Irrelevant, got '" +
                                          std::string(s) + "'");
}

bool OracleDiagnosis(const GroundTruth& gt, const std::string& admission_id) {
  return gt.Get(admission_id).true_label;
}

FeatureVerdict OracleFeatureVerdict(const DiseaseProfile& profile, std::string_view feature) {
  if (profile.IsPositivePhenotype(feature)) return FeatureVerdict::kRelevant;
  auto it = profile.structured_shift.find(std::string(feature));
  if (it != profile.structured_shift.end() && it->second != 0.0) return FeatureVerdict::kRelevant;
  return FeatureVerdict::kIrrelevant;
}

SimulatedClinician::SimulatedClinician(GroundTruth truth, DiseaseProfile profile, double noise,
                                       uint64_t seed)
    : truth_(std::move(truth)), profile_(std::move(profile)), noise_(noise), seed_(seed) {
  if (!(noise_ >= 0.0 && noise_ <= 1.0)) {
    throw Error(ErrorCode::kConfig, "oracle noise must lie in [0, 1]");
  }
}

bool SimulatedClinician::Diagnose(const std::string& admission_id) const {
  bool label = OracleDiagnosis(truth_, admission_id);
  if (noise_ > 0.0) {
    Rng rng(DeriveSeed(seed_, admission_id));
    if (rng.Bernoulli(noise_)) label = !label;
  }
  return label;
}

FeatureVerdict SimulatedClinician::JudgeFeature(std::string_view feature) const {
  return OracleFeatureVerdict(profile_, feature);
}

}  // namespace phenoid::synth
