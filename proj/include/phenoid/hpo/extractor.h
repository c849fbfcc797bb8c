#ifndef PHENOID_HPO_EXTRACTOR_H_
#define PHENOID_HPO_EXTRACTOR_H_

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phenoid/hpo/matcher.h"
#include "phenoid/hpo/ontology.h"

namespace phenoid::hpo {

struct PhenotypeMention {
  std::string hpo_id;
  size_t start = 0;  // byte offsets into the note, end exclusive
  size_t end = 0;
  std::string matched_text;
  bool negated = false;
};

struct ExtractionResult {
  std::vector<PhenotypeMention> mentions;
  std::set<std::string> ids;  // non-negated, deduplicated
};

// Note text -> phenotype concepts. Implementations must be safe for
// concurrent Extract calls.
class PhenotypeExtractor {
 public:
  virtual ~PhenotypeExtractor() = default;
  virtual ExtractionResult Extract(std::string_view note_text) const = 0;
};

std::vector<std::string> DefaultNegationCues();

struct LexiconExtractorOptions {
  std::vector<std::string> negation_cues = DefaultNegationCues();
  // A cue negates a match when its last token lies within this many tokens
  // before the match start, in the same sentence.
  size_t negation_window = 5;
  // Adds every is_a ancestor of an extracted id to the id set.
  bool propagate_ancestors = false;
};

class LexiconExtractor : public PhenotypeExtractor {
 public:
  LexiconExtractor(std::shared_ptr<const Ontology> ontology,
                   const std::vector<LexiconEntry>& extra, LexiconExtractorOptions options = {});

  ExtractionResult Extract(std::string_view note_text) const override;

  const Matcher& matcher() const { return matcher_; }
  const Ontology& ontology() const { return *ontology_; }

 private:
  std::shared_ptr<const Ontology> ontology_;
  Matcher matcher_;
  LexiconExtractorOptions options_;
  std::vector<std::vector<std::string>> cue_tokens_;
};

// Sentence boundaries are '.', ';' and newlines. Returns [begin, end) spans.
std::vector<std::pair<size_t, size_t>> SplitSentences(std::string_view text);

// Loads the shipped fixture ontology and lexicon.
std::shared_ptr<const LexiconExtractor> LoadDefaultExtractor(LexiconExtractorOptions options = {});

}  // namespace phenoid::hpo

#endif  // PHENOID_HPO_EXTRACTOR_H_
