#ifndef PHENOID_CORPUS_CRITERIA_H_
#define PHENOID_CORPUS_CRITERIA_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phenoid/corpus/admission.h"
#include "phenoid/corpus/icd.h"

namespace phenoid::corpus {

enum class CohortVerdict { kPositive, kNegative, kExcluded };

std::string_view CohortVerdictName(CohortVerdict v);

struct CodeAtom {
  enum class Kind { kExact, kSubcodeOf, kCategoryRange };
  Kind kind = Kind::kExact;
  std::string code;  // kExact, kSubcodeOf
  int lo = 0;        // kCategoryRange, inclusive numeric categories
  int hi = 0;

  bool Matches(const IcdCode& c) const;
};

// Disjunction of conjunctions: the predicate holds when some clause has every
// atom matched by at least one code of the admission.
//
// Text form: clauses separated by '|', atoms by '&'.
//   "183.0"          exact code
//   "162.*"          any subcode of 162 (including bare 162)
//   "140-239"        any code whose numeric category lies in [140, 239]
class CodePredicate {
 public:
  CodePredicate() = default;
  explicit CodePredicate(std::vector<std::vector<CodeAtom>> clauses)
      : clauses_(std::move(clauses)) {}
  static CodePredicate Parse(std::string_view text);

  bool Evaluate(const std::set<IcdCode>& codes) const;
  std::string ToString() const;
  bool empty() const { return clauses_.empty(); }

 private:
  std::vector<std::vector<CodeAtom>> clauses_;
};

struct DiseaseCriteria {
  std::string disease;
  CodePredicate inclusion;
  // When absent, every non-excluded admission failing inclusion is Negative.
  std::optional<CodePredicate> exclusion;
  // Admissions failing the background predicate are Excluded from both cohorts.
  std::optional<CodePredicate> background;

  bool has_background() const { return background.has_value(); }
};

CohortVerdict ApplyIcdCriteria(const EhrAdmission& admission, const DiseaseCriteria& criteria);
CohortVerdict ApplyIcdCriteria(const std::set<IcdCode>& codes, const DiseaseCriteria& criteria);

DiseaseCriteria OvarianCancerCriteria();
DiseaseCriteria LungCancerCriteria();
DiseaseCriteria CancerCachexiaCriteria();
DiseaseCriteria LupusNephritisCriteria();
std::vector<DiseaseCriteria> BuiltinCriteria();

// Case-, space- and underscore-insensitive lookup ("Cancer Cachexia",
// "cancer_cachexia", "cachexia"). Unknown names -> Error(kValidation).
DiseaseCriteria CriteriaByName(std::string_view name);

}  // namespace phenoid::corpus

#endif  // PHENOID_CORPUS_CRITERIA_H_
