#include "phenoid/synth/generator.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "phenoid/common/error.h"
#include "phenoid/common/io.h"
#include "phenoid/common/rng.h"
#include "phenoid/synth/templates.h"

namespace phenoid::synth {

using nlohmann::json;

const TruthRecord& GroundTruth::Get(const std::string& admission_id) const {
  auto it = records.find(admission_id);
  if (it == records.end()) {
    throw Error(ErrorCode::kLookup, "no ground truth for admission '" + admission_id + "'");
  }
  return it->second;
}

std::string SerializeGroundTruth(const GroundTruth& gt) {
  std::string out;
  for (const auto& [id, r] : gt.records) {
    json j = {{"admission_id", id},
              {"true_label", r.true_label},
              {"emitted_phenotypes", r.emitted_phenotypes},
              {"miscoded", r.miscoded}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

GroundTruth ParseGroundTruth(std::string_view text) {
  GroundTruth gt;
  size_t line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      TruthRecord r;
      r.true_label = j.at("true_label").get<bool>();
      r.emitted_phenotypes = j.value("emitted_phenotypes", std::set<std::string>{});
      r.miscoded = j.value("miscoded", false);
      gt.records[j.at("admission_id").get<std::string>()] = std::move(r);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse,
                  "ground truth line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return gt;
}

std::map<std::string, FeatureDistribution> DefaultFeatureDistributions() {
  return {
      {"capillary_refill_rate", {2.0, 1.0, 0.6, false}},
      {"diastolic_blood_pressure", {70.0, 12.0, 0.1, false}},
      {"fraction_inspired_oxygen", {0.35, 0.1, 0.3, false}},
      {"gcs_eye", {3.5, 0.6, 0.2, true}},
      {"gcs_motor", {5.5, 0.7, 0.2, true}},
      {"gcs_total", {13.5, 2.0, 0.2, true}},
      {"gcs_verbal", {4.2, 0.9, 0.2, true}},
      {"glucose", {130.0, 35.0, 0.15, false}},
      {"heart_rate", {85.0, 15.0, 0.05, false}},
      {"height", {170.0, 10.0, 0.4, false}},
      {"mean_blood_pressure", {85.0, 12.0, 0.1, false}},
      {"oxygen_saturation", {96.0, 2.5, 0.05, false}},
      {"ph", {7.39, 0.05, 0.3, false}},
      {"respiratory_rate", {18.0, 4.0, 0.05, false}},
      {"systolic_blood_pressure", {125.0, 18.0, 0.1, false}},
      {"temperature", {37.0, 0.6, 0.05, false}},
      {"weight", {78.0, 15.0, 0.2, false}},
  };
}

namespace {

std::string PaddedId(char prefix, int n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%06d", prefix, n);
  return buf;
}

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& values) {
  return values[static_cast<size_t>(rng.Index(values.size()))];
}

// Alias units the generator emits some of the time, canonical -> alias.
std::string AliasUnitFor(std::string_view key) {
  if (key == "temperature") return "F";
  if (key == "weight") return "lb";
  if (key == "height") return "in";
  return {};
}

}  // namespace

GeneratedCorpus GenerateCorpus(const DiseaseProfile& profile, int n_admissions, double prevalence,
                               uint64_t seed, const hpo::Matcher& matcher,
                               const corpus::StructuredFeatureCatalog& catalog) {
  profile.Validate();
  if (n_admissions < 1) throw Error(ErrorCode::kConfig, "n_admissions must be >= 1");
  if (!(prevalence > 0.0 && prevalence < 1.0)) {
    throw Error(ErrorCode::kConfig, "prevalence must lie in (0, 1)");
  }
  const int n_positive = static_cast<int>(std::floor(prevalence * n_admissions));
  if (n_positive < 1) {
    throw Error(ErrorCode::kConfig, "prevalence * n_admissions < 1: no positives to generate");
  }
  auto check_forms = [&](const std::string& id) {
    if (matcher.SurfaceForms(id).empty()) {
      throw Error(ErrorCode::kConfig, "phenotype " + id + " has no lexicon surface form");
    }
  };
  for (const auto& e : profile.positive_phenotypes) check_forms(e.hpo_id);
  for (const auto& e : profile.distractor_phenotypes) check_forms(e.hpo_id);
  for (const auto& e : profile.common_phenotypes) check_forms(e.hpo_id);

  const auto distributions = DefaultFeatureDistributions();

  std::vector<char> is_positive(static_cast<size_t>(n_admissions), 0);
  {
    Rng rng(DeriveSeed(seed, "positives"));
    for (size_t idx : rng.SampleWithoutReplacement(is_positive.size(), n_positive)) {
      is_positive[idx] = 1;
    }
  }

  // Phenotypes eligible for negated mentions.
  std::vector<std::string> negatable;
  for (const auto& e : profile.positive_phenotypes) negatable.push_back(e.hpo_id);
  for (const auto& e : profile.distractor_phenotypes) negatable.push_back(e.hpo_id);

  GeneratedCorpus out;
  Rng patient_rng(DeriveSeed(seed, "patients"));
  int patient_counter = 0;
  for (int i = 0; i < n_admissions; ++i) {
    Rng rng(DeriveSeed(seed, static_cast<uint64_t>(i)));
    const bool positive = is_positive[static_cast<size_t>(i)] != 0;
    corpus::EhrAdmission a;
    a.admission_id = PaddedId('A', i + 1);
    if (patient_counter == 0 || !patient_rng.Bernoulli(profile.repeat_patient_rate)) {
      ++patient_counter;
    }
    a.patient_id = PaddedId('P', patient_counter);

    // Phenotypes.
    std::set<std::string> emitted;
    if (positive) {
      for (const auto& e : profile.positive_phenotypes) {
        if (rng.Bernoulli(e.p)) emitted.insert(e.hpo_id);
      }
      if (emitted.empty() && !profile.positive_phenotypes.empty()) {
        auto best = std::max_element(
            profile.positive_phenotypes.begin(), profile.positive_phenotypes.end(),
            [](const PhenotypeEmission& x, const PhenotypeEmission& y) { return x.p < y.p; });
        emitted.insert(best->hpo_id);
      }
    }
    for (const auto& d : profile.distractor_phenotypes) {
      if (rng.Bernoulli(positive ? d.p_positive : d.p_negative)) emitted.insert(d.hpo_id);
    }
    for (const auto& c : profile.common_phenotypes) {
      if (rng.Bernoulli(c.p)) emitted.insert(c.hpo_id);
    }

    std::vector<std::string> sentences;
    for (const std::string& id : emitted) {
      const auto& forms = matcher.SurfaceForms(id);
      const std::string& form = Pick(rng, forms);
      auto affirmed = AffirmedTemplates();
      sentences.push_back(
          RealizeTemplate(affirmed[static_cast<size_t>(rng.Index(affirmed.size()))], form));
    }
    if (!negatable.empty() && rng.Bernoulli(profile.negated_mention_rate)) {
      const std::string& id = Pick(rng, negatable);
      if (!emitted.count(id)) {
        const std::string& form = Pick(rng, matcher.SurfaceForms(id));
        auto negated = NegatedTemplates();
        sentences.push_back(
            RealizeTemplate(negated[static_cast<size_t>(rng.Index(negated.size()))], form));
      }
    }
    auto filler = FillerSentences();
    const int n_filler = 1 + static_cast<int>(rng.Index(2));
    for (int k = 0; k < n_filler; ++k) {
      sentences.emplace_back(filler[static_cast<size_t>(rng.Index(filler.size()))]);
    }
    rng.Shuffle(sentences);
    for (size_t k = 0; k < sentences.size(); ++k) {
      if (k > 0) a.note_text += ' ';
      a.note_text += sentences[k];
    }

    // ICD codes.
    auto add_code = [&](const std::string& c) { a.icd_codes.insert(corpus::IcdCode::Parse(c)); };
    if (!profile.filler_codes.empty()) {
      const int n_codes = 1 + static_cast<int>(rng.Index(3));
      for (int k = 0; k < n_codes; ++k) add_code(Pick(rng, profile.filler_codes));
    }
    if (!profile.background_codes.empty() &&
        (positive || rng.Bernoulli(profile.background_rate))) {
      add_code(Pick(rng, profile.background_codes));
    }
    bool miscoded = false;
    if (positive) {
      miscoded = rng.Bernoulli(profile.miscode_fn_rate);
    } else {
      miscoded = rng.Bernoulli(profile.miscode_fp_rate);
    }
    if (positive != miscoded) {
      for (const std::string& c : profile.icd_positive_codes) add_code(c);
    }

    // Structured observations.
    for (const corpus::CatalogEntry& entry : catalog.entries()) {
      auto dist_it = distributions.find(entry.key);
      if (dist_it == distributions.end()) continue;
      const FeatureDistribution& dist = dist_it->second;
      if (rng.Bernoulli(dist.missing_rate)) continue;
      double mean = dist.mean;
      if (positive) {
        if (auto s = profile.structured_shift.find(entry.key); s != profile.structured_shift.end()) {
          mean += s->second;
        }
      }
      const int n_obs = 1 + static_cast<int>(rng.Index(3));
      for (int t = 0; t < n_obs; ++t) {
        double v = std::clamp(rng.Normal(mean, dist.stddev), entry.lo, entry.hi);
        if (dist.integer_valued) v = std::round(v);
        corpus::StructuredObservation obs{entry.key, t, v, entry.canonical_unit};
        const std::string alias = AliasUnitFor(entry.key);
        if (!alias.empty() && rng.Bernoulli(profile.alias_unit_rate)) {
          for (const corpus::UnitConversion& c : entry.aliases) {
            if (c.unit == alias) {
              obs.value = (v - c.offset) / c.scale;
              obs.unit = alias;
            }
          }
        }
        if (rng.Bernoulli(profile.implausible_value_rate)) {
          obs.value = rng.Bernoulli(0.5) ? -obs.value * 1e5 : obs.value * 1e6;
        }
        a.observations.push_back(std::move(obs));
      }
    }

    out.truth.records[a.admission_id] = TruthRecord{positive, std::move(emitted), miscoded};
    out.admissions.push_back(std::move(a));
  }
  return out;
}

}  // namespace phenoid::synth
