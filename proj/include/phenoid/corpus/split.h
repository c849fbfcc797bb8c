#ifndef PHENOID_CORPUS_SPLIT_H_
#define PHENOID_CORPUS_SPLIT_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "phenoid/corpus/admission.h"

namespace phenoid::corpus {

struct DatasetSplit {
  std::set<std::string> train_ids;
  std::set<std::string> test_ids;
  std::vector<std::string> warnings;

  bool operator==(const DatasetSplit& o) const {
    return train_ids == o.train_ids && test_ids == o.test_ids;
  }
};

// Patient-disjoint split. Patients are shuffled by seed and packed into the
// training side until it holds at least train_fraction of all admissions.
// A single-patient corpus goes entirely to train with a warning.
DatasetSplit SplitByPatient(const std::vector<EhrAdmission>& corpus, double train_fraction,
                            uint64_t seed);

}  // namespace phenoid::corpus

#endif  // PHENOID_CORPUS_SPLIT_H_
