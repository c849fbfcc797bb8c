#ifndef PHENOID_SYNTH_TEMPLATES_H_
#define PHENOID_SYNTH_TEMPLATES_H_

#include <span>
#include <string>
#include <string_view>

namespace phenoid::synth {

// Sentence templates shared by the note generator and the extractor tests.
// "{}" marks the phenotype slot. Affirmed templates contain no negation cue
// and no lexicon phrase; negated templates put a cue right before the slot.
std::span<const std::string_view> AffirmedTemplates();
std::span<const std::string_view> NegatedTemplates();
// Sentences without any phenotype mention.
std::span<const std::string_view> FillerSentences();

std::string RealizeTemplate(std::string_view tmpl, std::string_view phrase);

}  // namespace phenoid::synth

#endif  // PHENOID_SYNTH_TEMPLATES_H_
