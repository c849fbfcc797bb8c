#ifndef PHENOID_CORPUS_ADMISSION_H_
#define PHENOID_CORPUS_ADMISSION_H_

#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "phenoid/corpus/catalog.h"
#include "phenoid/corpus/icd.h"

namespace phenoid::corpus {

struct EhrAdmission {
  std::string admission_id;
  std::string patient_id;
  std::set<IcdCode> icd_codes;
  std::string note_text;
  std::vector<StructuredObservation> observations;

  bool HasCode(std::string_view code) const;
};

// One JSON object per line: admission_id, patient_id, icd_codes, note_text,
// observations [{feature, t, value, unit}]. Blank lines are skipped.
// Errors: kParse with the 1-based line number; kDuplicate naming the id.
std::vector<EhrAdmission> ParseCorpus(std::istream& in);
std::vector<EhrAdmission> ParseCorpusFile(const std::string& path);

std::string SerializeAdmission(const EhrAdmission& admission);
std::string SerializeCorpus(const std::vector<EhrAdmission>& corpus);

// Per-feature arithmetic mean; features with no observations are absent.
std::map<std::string, double> AggregateAdmission(
    const std::vector<StructuredObservation>& normalized);

struct NormalizedAdmission {
  std::vector<StructuredObservation> kept;
  std::vector<std::string> rejections;
};

// Normalizes every observation against the catalog, dropping rejected values.
NormalizedAdmission NormalizeAdmission(const EhrAdmission& admission,
                                       const StructuredFeatureCatalog& catalog);

}  // namespace phenoid::corpus

#endif  // PHENOID_CORPUS_ADMISSION_H_
