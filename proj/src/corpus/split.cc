#include "phenoid/corpus/split.h"

#include <map>

#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"

namespace phenoid::corpus {

DatasetSplit SplitByPatient(const std::vector<EhrAdmission>& corpus, double train_fraction,
                            uint64_t seed) {
  if (corpus.empty()) throw Error(ErrorCode::kConfig, "cannot split an empty corpus");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kConfig, "train_fraction must lie in (0, 1)");
  }
  // std::map keeps patients sorted, so the shuffle input is order-independent.
  std::map<std::string, std::vector<const EhrAdmission*>> by_patient;
  for (const EhrAdmission& a : corpus) by_patient[a.patient_id].push_back(&a);

  DatasetSplit split;
  if (by_patient.size() == 1) {
    split.warnings.push_back("degenerate split: single patient, all admissions assigned to train");
    for (const EhrAdmission& a : corpus) split.train_ids.insert(a.admission_id);
    return split;
  }

  std::vector<const std::vector<const EhrAdmission*>*> patients;
  for (const auto& [id, admissions] : by_patient) patients.push_back(&admissions);
  Rng rng(DeriveSeed(seed, "split"));
  rng.Shuffle(patients);

  const double target = train_fraction * static_cast<double>(corpus.size());
  size_t train_count = 0;
  for (const auto* admissions : patients) {
    const bool to_train = static_cast<double>(train_count) < target;
    for (const EhrAdmission* a : *admissions) {
      (to_train ? split.train_ids : split.test_ids).insert(a->admission_id);
    }
    if (to_train) train_count += admissions->size();
  }
  if (split.test_ids.empty()) {
    split.warnings.push_back("degenerate split: test side is empty");
  }
  return split;
}

}  // namespace phenoid::corpus
