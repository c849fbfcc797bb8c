#ifndef PHENOID_HPO_ONTOLOGY_H_
#define PHENOID_HPO_ONTOLOGY_H_

#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace phenoid::hpo {

struct HpoTerm {
  std::string id;  // "HP:" + 7 digits
  std::string name;
  std::vector<std::string> synonyms;
  std::vector<std::string> parents;
};

bool IsHpoId(std::string_view id);

class Ontology {
 public:
  Ontology() = default;
  // Validates ids, names, parent resolution and acyclicity.
  explicit Ontology(std::vector<HpoTerm> terms);

  // OBO-like stanza grammar: "[Term]" headers; id:, name:, synonym: "...",
  // is_a: lines; anything else is ignored.
  static Ontology Parse(std::istream& in);
  static Ontology ParseFile(const std::string& path);

  const std::map<std::string, HpoTerm>& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }
  bool Contains(std::string_view id) const { return terms_.find(std::string(id)) != terms_.end(); }
  // Throws Error(kLookup) for unknown ids.
  const HpoTerm& Get(std::string_view id) const;
  // Strict ancestors via is_a.
  std::set<std::string> Ancestors(std::string_view id) const;

 private:
  std::map<std::string, HpoTerm> terms_;
};

}  // namespace phenoid::hpo

#endif  // PHENOID_HPO_ONTOLOGY_H_
