#include "phenoid/corpus/admission.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::corpus {

using nlohmann::json;

bool EhrAdmission::HasCode(std::string_view code) const {
  for (const IcdCode& c : icd_codes) {
    if (c.str() == code) return true;
  }
  return false;
}

namespace {

EhrAdmission FromJson(const json& j) {
  EhrAdmission a;
  a.admission_id = j.at("admission_id").get<std::string>();
  a.patient_id = j.at("patient_id").get<std::string>();
  if (a.admission_id.empty()) throw Error(ErrorCode::kParse, "empty admission_id");
  if (a.patient_id.empty()) throw Error(ErrorCode::kParse, "empty patient_id");
  for (const json& code : j.at("icd_codes")) {
    a.icd_codes.insert(IcdCode::Parse(code.get<std::string>()));
  }
  a.note_text = j.value("note_text", std::string());
  if (j.contains("observations")) {
    for (const json& o : j.at("observations")) {
      StructuredObservation obs;
      obs.feature = o.at("feature").get<std::string>();
      obs.timestamp = o.value("t", 0);
      obs.value = o.at("value").get<double>();
      obs.unit = o.at("unit").get<std::string>();
      a.observations.push_back(std::move(obs));
    }
  }
  return a;
}

}  // namespace

std::vector<EhrAdmission> ParseCorpus(std::istream& in) {
  std::vector<EhrAdmission> out;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    EhrAdmission a;
    try {
      a = FromJson(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse,
                  "corpus line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse,
                  "corpus line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(a.admission_id).second) {
      throw Error(ErrorCode::kDuplicate, "duplicate admission_id '" + a.admission_id +
                                             "' at line " + std::to_string(line_no));
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<EhrAdmission> ParseCorpusFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path);
  return ParseCorpus(in);
}

std::string SerializeAdmission(const EhrAdmission& a) {
  json j;
  j["admission_id"] = a.admission_id;
  j["patient_id"] = a.patient_id;
  json codes = json::array();
  for (const IcdCode& c : a.icd_codes) codes.push_back(c.str());
  j["icd_codes"] = std::move(codes);
  j["note_text"] = a.note_text;
  json obs = json::array();
  for (const StructuredObservation& o : a.observations) {
    obs.push_back({{"feature", o.feature}, {"t", o.timestamp}, {"value", o.value}, {"unit", o.unit}});
  }
  j["observations"] = std::move(obs);
  return j.dump();
}

std::string SerializeCorpus(const std::vector<EhrAdmission>& corpus) {
  std::string out;
  for (const EhrAdmission& a : corpus) {
    out += SerializeAdmission(a);
    out += '\n';
  }
  return out;
}

std::map<std::string, double> AggregateAdmission(
    const std::vector<StructuredObservation>& normalized) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const StructuredObservation& o : normalized) {
    auto& [sum, count] = acc[o.feature];
    sum += o.value;
    ++count;
  }
  std::map<std::string, double> out;
  for (const auto& [key, sc] : acc) out.emplace(key, sc.first / sc.second);
  return out;
}

NormalizedAdmission NormalizeAdmission(const EhrAdmission& admission,
                                       const StructuredFeatureCatalog& catalog) {
  NormalizedAdmission out;
  for (const StructuredObservation& o : admission.observations) {
    NormalizedObservation n = NormalizeObservation(o, catalog);
    if (auto* kept = std::get_if<StructuredObservation>(&n)) {
      out.kept.push_back(std::move(*kept));
    } else {
      out.rejections.push_back(std::get<Rejection>(n).reason);
    }
  }
  return out;
}

}  // namespace phenoid::corpus
