#include "phenoid/synth/templates.h"

#include <array>

namespace phenoid::synth {

namespace {

constexpr std::array<std::string_view, 8> kAffirmed = {
    "Patient presents with {}.",
    "{} noted on exam.",
    "History significant for {}.",
    "Reports {} over the past weeks.",
    "Findings consistent with {}.",
    "Assessment includes {}.",
    "Course complicated by {}.",
    "Family reports {} at home.",
};

constexpr std::array<std::string_view, 5> kNegated = {
    "Denies {}.",
    "No evidence of {}.",
    "Negative for {}.",
    "No {} reported.",
    "Admitted without {}.",
};

constexpr std::array<std::string_view, 6> kFiller = {
    "Patient admitted for further management.",
    "Vital signs reviewed with the team.",
    "Plan discussed with patient and family.",
    "Discharged home in stable condition.",
    "Medications reconciled at discharge.",
    "Follow up arranged with primary care.",
};

}  // namespace

std::span<const std::string_view> AffirmedTemplates() { return kAffirmed; }
std::span<const std::string_view> NegatedTemplates() { return kNegated; }
std::span<const std::string_view> FillerSentences() { return kFiller; }

std::string RealizeTemplate(std::string_view tmpl, std::string_view phrase) {
  std::string out;
  size_t slot = tmpl.find("{}");
  out.append(tmpl.substr(0, slot));
  out.append(phrase);
  if (slot != std::string_view::npos) out.append(tmpl.substr(slot + 2));
  return out;
}

}  // namespace phenoid::synth
