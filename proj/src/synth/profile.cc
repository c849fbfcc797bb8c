#include "phenoid/synth/profile.h"

#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "phenoid/common/error.h"
#include "phenoid/common/io.h"
#include "phenoid/corpus/icd.h"

namespace phenoid::synth {

using nlohmann::json;

namespace {

void CheckProbability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kConfig, what + " must lie in [0, 1]");
  }
}

void CheckCodes(const std::vector<std::string>& codes) {
  for (const std::string& c : codes) {
    if (!corpus::IcdCode::IsValid(c)) throw Error(ErrorCode::kConfig, "bad ICD code " + c);
  }
}

}  // namespace

void DiseaseProfile::Validate() const {
  if (disease.empty()) throw Error(ErrorCode::kConfig, "profile has no disease name");
  for (const auto& e : positive_phenotypes) CheckProbability(e.p, "emission of " + e.hpo_id);
  for (const auto& e : common_phenotypes) CheckProbability(e.p, "emission of " + e.hpo_id);
  for (const auto& d : distractor_phenotypes) {
    CheckProbability(d.p_negative, "distractor " + d.hpo_id);
    CheckProbability(d.p_positive, "distractor " + d.hpo_id);
    if (IsPositivePhenotype(d.hpo_id)) {
      throw Error(ErrorCode::kConfig, d.hpo_id + " is both a positive and a distractor phenotype");
    }
  }
  for (const auto& e : common_phenotypes) {
    if (IsPositivePhenotype(e.hpo_id) || IsDistractor(e.hpo_id)) {
      throw Error(ErrorCode::kConfig, e.hpo_id + " listed as common and disease-linked");
    }
  }
  CheckProbability(background_rate, "background_rate");
  CheckProbability(miscode_fn_rate, "miscode_fn_rate");
  CheckProbability(miscode_fp_rate, "miscode_fp_rate");
  CheckProbability(negated_mention_rate, "negated_mention_rate");
  CheckProbability(alias_unit_rate, "alias_unit_rate");
  CheckProbability(implausible_value_rate, "implausible_value_rate");
  CheckProbability(repeat_patient_rate, "repeat_patient_rate");
  CheckCodes(icd_positive_codes);
  CheckCodes(background_codes);
  CheckCodes(filler_codes);
  if (icd_positive_codes.empty()) throw Error(ErrorCode::kConfig, "profile has no positive codes");
}

bool DiseaseProfile::IsPositivePhenotype(std::string_view id) const {
  return std::any_of(positive_phenotypes.begin(), positive_phenotypes.end(),
                     [&](const PhenotypeEmission& e) { return e.hpo_id == id; });
}

bool DiseaseProfile::IsDistractor(std::string_view id) const {
  return std::any_of(distractor_phenotypes.begin(), distractor_phenotypes.end(),
                     [&](const DistractorEmission& e) { return e.hpo_id == id; });
}

DiseaseProfile ParseProfile(std::string_view text) {
  DiseaseProfile p;
  try {
    json j = json::parse(text);
    p.disease = j.at("disease").get<std::string>();
    p.criteria = j.value("criteria", p.disease);
    for (const json& e : j.value("positive_phenotypes", json::array())) {
      p.positive_phenotypes.push_back({e.at("hpo_id").get<std::string>(), e.at("p").get<double>()});
    }
    for (const json& e : j.value("distractor_phenotypes", json::array())) {
      double pn = e.at("p_negative").get<double>();
      p.distractor_phenotypes.push_back(
          {e.at("hpo_id").get<std::string>(), pn, e.value("p_positive", pn)});
    }
    for (const json& e : j.value("common_phenotypes", json::array())) {
      p.common_phenotypes.push_back({e.at("hpo_id").get<std::string>(), e.at("p").get<double>()});
    }
    p.structured_shift = j.value("structured_shift", std::map<std::string, double>{});
    p.icd_positive_codes = j.at("icd_positive_codes").get<std::vector<std::string>>();
    p.background_codes = j.value("background_codes", std::vector<std::string>{});
    p.background_rate = j.value("background_rate", 0.0);
    p.filler_codes = j.value("filler_codes", std::vector<std::string>{});
    p.miscode_fn_rate = j.value("miscode_fn_rate", p.miscode_fn_rate);
    p.miscode_fp_rate = j.value("miscode_fp_rate", p.miscode_fp_rate);
    p.negated_mention_rate = j.value("negated_mention_rate", p.negated_mention_rate);
    p.alias_unit_rate = j.value("alias_unit_rate", p.alias_unit_rate);
    p.implausible_value_rate = j.value("implausible_value_rate", p.implausible_value_rate);
    p.repeat_patient_rate = j.value("repeat_patient_rate", p.repeat_patient_rate);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("profile: ") + e.what());
  }
  p.Validate();
  return p;
}

DiseaseProfile LoadProfile(const std::string& path) { return ParseProfile(ReadFile(path)); }

std::string SerializeProfile(const DiseaseProfile& p) {
  json j;
  j["disease"] = p.disease;
  j["criteria"] = p.criteria;
  j["positive_phenotypes"] = json::array();
  for (const auto& e : p.positive_phenotypes) {
    j["positive_phenotypes"].push_back({{"hpo_id", e.hpo_id}, {"p", e.p}});
  }
  j["distractor_phenotypes"] = json::array();
  for (const auto& e : p.distractor_phenotypes) {
    j["distractor_phenotypes"].push_back(
        {{"hpo_id", e.hpo_id}, {"p_negative", e.p_negative}, {"p_positive", e.p_positive}});
  }
  j["common_phenotypes"] = json::array();
  for (const auto& e : p.common_phenotypes) {
    j["common_phenotypes"].push_back({{"hpo_id", e.hpo_id}, {"p", e.p}});
  }
  j["structured_shift"] = p.structured_shift;
  j["icd_positive_codes"] = p.icd_positive_codes;
  j["background_codes"] = p.background_codes;
  j["background_rate"] = p.background_rate;
  j["filler_codes"] = p.filler_codes;
  j["miscode_fn_rate"] = p.miscode_fn_rate;
  j["miscode_fp_rate"] = p.miscode_fp_rate;
  j["negated_mention_rate"] = p.negated_mention_rate;
  j["alias_unit_rate"] = p.alias_unit_rate;
  j["implausible_value_rate"] = p.implausible_value_rate;
  j["repeat_patient_rate"] = p.repeat_patient_rate;
  return j.dump(2) + "\n";
}

DiseaseProfile LoadShippedProfile(std::string_view disease) {
  std::string key;
  for (char c : disease) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  std::string file;
  if (key.find("cachexia") != std::string::npos) file = "cancer_cachexia.json";
  else if (key.find("ovarian") != std::string::npos) file = "ovarian_cancer.json";
  else if (key.find("lung") != std::string::npos) file = "lung_cancer.json";
  else if (key.find("lupus") != std::string::npos) file = "lupus_nephritis.json";
  else throw Error(ErrorCode::kValidation, "no shipped profile for '" + std::string(disease) + "'");
  return LoadProfile(DataPath("profiles/" + file).string());
}

}  // namespace phenoid::synth
