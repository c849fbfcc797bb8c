#include "phenoid/corpus/criteria.h"

#include <cctype>
#include <charconv>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::corpus {

std::string_view CohortVerdictName(CohortVerdict v) {
  switch (v) {
    case CohortVerdict::kPositive: return "Positive";
    case CohortVerdict::kNegative: return "Negative";
    case CohortVerdict::kExcluded: return "Excluded";
  }
  return "?";
}

bool CodeAtom::Matches(const IcdCode& c) const {
  switch (kind) {
    case Kind::kExact: return c.str() == code;
    case Kind::kSubcodeOf: return c.IsSubcodeOf(code);
    case Kind::kCategoryRange: {
      auto cat = c.numeric_category();
      return cat && *cat >= lo && *cat <= hi;
    }
  }
  return false;
}

namespace {

int ParseCategory(std::string_view s, std::string_view whole) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.size() != 3) {
    throw Error(ErrorCode::kParse, "bad category range in code rule '" + std::string(whole) + "'");
  }
  return v;
}

CodeAtom ParseAtom(std::string_view raw, std::string_view whole) {
  std::string_view s = Trim(raw);
  if (s.empty()) throw Error(ErrorCode::kParse, "empty atom in code rule '" + std::string(whole) + "'");
  CodeAtom atom;
  if (size_t dash = s.find('-'); dash != std::string_view::npos) {
    atom.kind = CodeAtom::Kind::kCategoryRange;
    atom.lo = ParseCategory(Trim(s.substr(0, dash)), whole);
    atom.hi = ParseCategory(Trim(s.substr(dash + 1)), whole);
    if (atom.lo > atom.hi) {
      throw Error(ErrorCode::kParse, "inverted range in code rule '" + std::string(whole) + "'");
    }
    return atom;
  }
  if (s.size() > 2 && s.substr(s.size() - 2) == ".*") {
    atom.kind = CodeAtom::Kind::kSubcodeOf;
    atom.code = IcdCode::Parse(s.substr(0, s.size() - 2)).str();
    return atom;
  }
  atom.kind = CodeAtom::Kind::kExact;
  atom.code = IcdCode::Parse(s).str();
  return atom;
}

}  // namespace

CodePredicate CodePredicate::Parse(std::string_view text) {
  std::vector<std::vector<CodeAtom>> clauses;
  if (Trim(text).empty()) {
    throw Error(ErrorCode::kParse, "empty code rule");
  }
  for (std::string_view clause : Split(text, '|')) {
    std::vector<CodeAtom> atoms;
    for (std::string_view atom : Split(clause, '&')) atoms.push_back(ParseAtom(atom, text));
    clauses.push_back(std::move(atoms));
  }
  return CodePredicate(std::move(clauses));
}

bool CodePredicate::Evaluate(const std::set<IcdCode>& codes) const {
  for (const auto& clause : clauses_) {
    bool all = true;
    for (const CodeAtom& atom : clause) {
      bool any = false;
      for (const IcdCode& c : codes) {
        if (atom.Matches(c)) {
          any = true;
          break;
        }
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

std::string CodePredicate::ToString() const {
  std::string out;
  for (size_t i = 0; i < clauses_.size(); ++i) {
    if (i > 0) out += " | ";
    for (size_t j = 0; j < clauses_[i].size(); ++j) {
      if (j > 0) out += " & ";
      const CodeAtom& a = clauses_[i][j];
      switch (a.kind) {
        case CodeAtom::Kind::kExact: out += a.code; break;
        case CodeAtom::Kind::kSubcodeOf: out += a.code + ".*"; break;
        case CodeAtom::Kind::kCategoryRange:
          out += std::to_string(a.lo) + "-" + std::to_string(a.hi);
          break;
      }
    }
  }
  return out;
}

CohortVerdict ApplyIcdCriteria(const std::set<IcdCode>& codes, const DiseaseCriteria& criteria) {
  if (criteria.background && !criteria.background->Evaluate(codes)) {
    return CohortVerdict::kExcluded;
  }
  if (criteria.inclusion.Evaluate(codes)) return CohortVerdict::kPositive;
  if (criteria.exclusion && !criteria.exclusion->Evaluate(codes)) return CohortVerdict::kExcluded;
  return CohortVerdict::kNegative;
}

CohortVerdict ApplyIcdCriteria(const EhrAdmission& admission, const DiseaseCriteria& criteria) {
  return ApplyIcdCriteria(admission.icd_codes, criteria);
}

DiseaseCriteria OvarianCancerCriteria() {
  return {"Ovarian Cancer", CodePredicate::Parse("183.0"), std::nullopt, std::nullopt};
}

DiseaseCriteria LungCancerCriteria() {
  return {"Lung Cancer", CodePredicate::Parse("162.*"), std::nullopt, std::nullopt};
}

DiseaseCriteria CancerCachexiaCriteria() {
  return {"Cancer Cachexia", CodePredicate::Parse("799.3 | 799.4"), std::nullopt,
          CodePredicate::Parse("140-239")};
}

DiseaseCriteria LupusNephritisCriteria() {
  return {"Lupus Nephritis", CodePredicate::Parse("710.0 & 580.*"), std::nullopt, std::nullopt};
}

std::vector<DiseaseCriteria> BuiltinCriteria() {
  return {OvarianCancerCriteria(), LungCancerCriteria(), CancerCachexiaCriteria(),
          LupusNephritisCriteria()};
}

namespace {

std::string Canonical(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

}  // namespace

DiseaseCriteria CriteriaByName(std::string_view name) {
  const std::string key = Canonical(name);
  for (DiseaseCriteria& c : BuiltinCriteria()) {
    if (Canonical(c.disease) == key) return c;
  }
  if (key == "cachexia" || key == "cachexiaincancer") return CancerCachexiaCriteria();
  if (key == "ovarian") return OvarianCancerCriteria();
  if (key == "lung") return LungCancerCriteria();
  if (key == "lupus") return LupusNephritisCriteria();
  throw Error(ErrorCode::kValidation, "unknown disease '" + std::string(name) +
                                          "' and no custom criteria supplied");
}

}  // namespace phenoid::corpus
