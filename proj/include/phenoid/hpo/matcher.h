#ifndef PHENOID_HPO_MATCHER_H_
#define PHENOID_HPO_MATCHER_H_

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phenoid/hpo/ontology.h"

namespace phenoid::hpo {

// A case-folded alphanumeric run and its byte span in the source text.
struct Token {
  std::string text;
  size_t begin = 0;
  size_t end = 0;
};

std::vector<Token> Tokenize(std::string_view text, size_t base_offset = 0);

struct LexiconEntry {
  std::string phrase;
  std::string hpo_id;
};

// Supplementary abbreviations and contextual synonyms: "phrase<TAB>HP:NNNNNNN".
std::vector<LexiconEntry> ParseLexicon(std::istream& in);
std::vector<LexiconEntry> ParseLexiconFile(const std::string& path);

struct TrieMatch {
  std::string hpo_id;
  size_t token_begin = 0;
  size_t token_end = 0;  // exclusive
};

// Token trie over every name, synonym and supplementary phrase. Immutable
// after construction.
class Matcher {
 public:
  // Throws Error(kConflict) when one normalized phrase maps to two ids.
  Matcher(const Ontology& ontology, const std::vector<LexiconEntry>& extra);

  // Longest phrase starting at tokens[start], if any.
  std::optional<TrieMatch> LongestAt(std::span<const Token> tokens, size_t start) const;
  // Greedy left-to-right longest-match segmentation.
  std::vector<TrieMatch> FindAll(std::span<const Token> tokens) const;

  // Surface forms (original casing) that map to `hpo_id`, in insertion order:
  // name, synonyms, then supplementary entries.
  const std::vector<std::string>& SurfaceForms(std::string_view hpo_id) const;
  size_t phrase_count() const { return phrase_count_; }

 private:
  struct Node {
    std::map<std::string, int, std::less<>> children;
    std::string hpo_id;  // empty unless a phrase ends here
  };
  void Insert(std::string_view phrase, const std::string& hpo_id);

  std::vector<Node> nodes_;
  std::map<std::string, std::vector<std::string>, std::less<>> surface_forms_;
  size_t phrase_count_ = 0;
};

}  // namespace phenoid::hpo

#endif  // PHENOID_HPO_MATCHER_H_
