#include "phenoid/hpo/matcher.h"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::hpo {

std::vector<Token> Tokenize(std::string_view text, size_t base_offset) {
  std::vector<Token> tokens;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) {
      tokens.push_back({ToLower(text.substr(start, i - start)), base_offset + start,
                        base_offset + i});
    }
  }
  return tokens;
}

std::vector<LexiconEntry> ParseLexicon(std::istream& in) {
  std::vector<LexiconEntry> out;
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.rfind('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "lexicon line " + std::to_string(line_no) +
                                         ": expected phrase<TAB>HP:NNNNNNN");
    }
    std::string phrase(Trim(line.substr(0, tab)));
    std::string id(Trim(line.substr(tab + 1)));
    if (phrase.empty() || !IsHpoId(id)) {
      throw Error(ErrorCode::kParse, "lexicon line " + std::to_string(line_no) + ": bad entry");
    }
    out.push_back({std::move(phrase), std::move(id)});
  }
  return out;
}

std::vector<LexiconEntry> ParseLexiconFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open lexicon " + path);
  return ParseLexicon(in);
}

Matcher::Matcher(const Ontology& ontology, const std::vector<LexiconEntry>& extra) {
  nodes_.emplace_back();
  for (const auto& [id, term] : ontology.terms()) {
    Insert(term.name, id);
    for (const std::string& s : term.synonyms) Insert(s, id);
  }
  for (const LexiconEntry& e : extra) Insert(e.phrase, e.hpo_id);
}

void Matcher::Insert(std::string_view phrase, const std::string& hpo_id) {
  std::vector<Token> tokens = Tokenize(phrase);
  if (tokens.empty()) {
    throw Error(ErrorCode::kParse, "phrase '" + std::string(phrase) + "' has no tokens");
  }
  int node = 0;
  for (const Token& t : tokens) {
    auto it = nodes_[node].children.find(t.text);
    if (it == nodes_[node].children.end()) {
      nodes_.emplace_back();
      int child = static_cast<int>(nodes_.size()) - 1;
      nodes_[node].children.emplace(t.text, child);
      node = child;
    } else {
      node = it->second;
    }
  }
  std::string& slot = nodes_[node].hpo_id;
  if (!slot.empty() && slot != hpo_id) {
    throw Error(ErrorCode::kConflict, "phrase '" + std::string(phrase) + "' maps to both " +
                                          slot + " and " + hpo_id);
  }
  if (slot.empty()) ++phrase_count_;
  slot = hpo_id;
  auto& forms = surface_forms_[hpo_id];
  if (std::find(forms.begin(), forms.end(), phrase) == forms.end()) {
    forms.emplace_back(phrase);
  }
}

std::optional<TrieMatch> Matcher::LongestAt(std::span<const Token> tokens, size_t start) const {
  std::optional<TrieMatch> best;
  int node = 0;
  for (size_t i = start; i < tokens.size(); ++i) {
    auto it = nodes_[node].children.find(tokens[i].text);
    if (it == nodes_[node].children.end()) break;
    node = it->second;
    if (!nodes_[node].hpo_id.empty()) best = TrieMatch{nodes_[node].hpo_id, start, i + 1};
  }
  return best;
}

std::vector<TrieMatch> Matcher::FindAll(std::span<const Token> tokens) const {
  std::vector<TrieMatch> out;
  size_t i = 0;
  while (i < tokens.size()) {
    if (auto m = LongestAt(tokens, i)) {
      i = m->token_end;
      out.push_back(std::move(*m));
    } else {
      ++i;
    }
  }
  return out;
}

const std::vector<std::string>& Matcher::SurfaceForms(std::string_view hpo_id) const {
  static const std::vector<std::string> kNone;
  auto it = surface_forms_.find(hpo_id);
  return it == surface_forms_.end() ? kNone : it->second;
}

}  // namespace phenoid::hpo
