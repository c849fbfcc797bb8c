#include "phenoid/hpo/extractor.h"

#include "phenoid/common/io.h"

namespace phenoid::hpo {

std::vector<std::string> DefaultNegationCues() {
  return {"no", "denies", "without", "no evidence of", "negative for"};
}

std::vector<std::pair<size_t, size_t>> SplitSentences(std::string_view text) {
  std::vector<std::pair<size_t, size_t>> out;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '.' || text[i] == ';' || text[i] == '\n') {
      if (i > start) out.emplace_back(start, i);
      start = i + 1;
    }
  }
  return out;
}

LexiconExtractor::LexiconExtractor(std::shared_ptr<const Ontology> ontology,
                                   const std::vector<LexiconEntry>& extra,
                                   LexiconExtractorOptions options)
    : ontology_(std::move(ontology)), matcher_(*ontology_, extra), options_(std::move(options)) {
  for (const std::string& cue : options_.negation_cues) {
    std::vector<std::string> toks;
    for (Token& t : Tokenize(cue)) toks.push_back(std::move(t.text));
    if (!toks.empty()) cue_tokens_.push_back(std::move(toks));
  }
}

ExtractionResult LexiconExtractor::Extract(std::string_view note) const {
  ExtractionResult result;
  for (auto [begin, end] : SplitSentences(note)) {
    std::vector<Token> tokens = Tokenize(note.substr(begin, end - begin), begin);
    if (tokens.empty()) continue;
    // cue_end[i]: true if some cue ends right before token i (exclusive end).
    std::vector<char> cue_ends_at(tokens.size() + 1, 0);
    for (const auto& cue : cue_tokens_) {
      for (size_t s = 0; s + cue.size() <= tokens.size(); ++s) {
        bool match = true;
        for (size_t k = 0; k < cue.size() && match; ++k) match = tokens[s + k].text == cue[k];
        if (match) cue_ends_at[s + cue.size()] = 1;
      }
    }
    for (TrieMatch& m : matcher_.FindAll(tokens)) {
      PhenotypeMention mention;
      mention.hpo_id = std::move(m.hpo_id);
      mention.start = tokens[m.token_begin].begin;
      mention.end = tokens[m.token_end - 1].end;
      mention.matched_text = std::string(note.substr(mention.start, mention.end - mention.start));
      // Cue's last token at index match_start - d, d in [1, window].
      for (size_t d = 1; d <= options_.negation_window && d <= m.token_begin; ++d) {
        if (cue_ends_at[m.token_begin - d + 1]) {
          mention.negated = true;
          break;
        }
      }
      if (!mention.negated) {
        result.ids.insert(mention.hpo_id);
        if (options_.propagate_ancestors) {
          for (const std::string& a : ontology_->Ancestors(mention.hpo_id)) result.ids.insert(a);
        }
      }
      result.mentions.push_back(std::move(mention));
    }
  }
  return result;
}

std::shared_ptr<const LexiconExtractor> LoadDefaultExtractor(LexiconExtractorOptions options) {
  auto ontology =
      std::make_shared<const Ontology>(Ontology::ParseFile(DataPath("hpo_subset.obo").string()));
  auto lexicon = ParseLexiconFile(DataPath("lexicon.tsv").string());
  return std::make_shared<const LexiconExtractor>(ontology, lexicon, std::move(options));
}

}  // namespace phenoid::hpo
