#include "phenoid/corpus/catalog.h"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::corpus {

StructuredFeatureCatalog::StructuredFeatureCatalog(std::vector<CatalogEntry> entries)
    : entries_(std::move(entries)) {
  for (size_t i = 0; i < entries_.size(); ++i) {
    const CatalogEntry& e = entries_[i];
    if (e.key.empty()) throw Error(ErrorCode::kCatalog, "catalog entry with empty key");
    if (!(e.lo < e.hi)) {
      throw Error(ErrorCode::kCatalog, "catalog entry '" + e.key + "' has lo >= hi");
    }
    std::set<std::string> units{e.canonical_unit};
    for (const UnitConversion& c : e.aliases) {
      if (c.scale == 0.0) {
        throw Error(ErrorCode::kCatalog,
                    "conversion " + c.unit + " for '" + e.key + "' is not invertible");
      }
      if (!units.insert(c.unit).second) {
        throw Error(ErrorCode::kCatalog, "duplicate unit " + c.unit + " for '" + e.key + "'");
      }
    }
    if (!index_.emplace(e.key, i).second) {
      throw Error(ErrorCode::kCatalog, "duplicate catalog key '" + e.key + "'");
    }
  }
}

StructuredFeatureCatalog StructuredFeatureCatalog::Default() {
  const double f_scale = 5.0 / 9.0;
  const double f_offset = -32.0 * 5.0 / 9.0;
  return StructuredFeatureCatalog({
      {"capillary_refill_rate", "s", 0.0, 20.0, {}},
      {"diastolic_blood_pressure", "mmHg", 10.0, 200.0, {{"kPa", 7.50062, 0.0}}},
      {"fraction_inspired_oxygen", "fraction", 0.21, 1.0, {{"%", 0.01, 0.0}}},
      {"gcs_eye", "score", 1.0, 4.0, {}},
      {"gcs_motor", "score", 1.0, 6.0, {}},
      {"gcs_total", "score", 3.0, 15.0, {}},
      {"gcs_verbal", "score", 1.0, 5.0, {}},
      {"glucose", "mg/dL", 10.0, 1500.0, {{"mmol/L", 18.0, 0.0}}},
      {"heart_rate", "bpm", 10.0, 300.0, {}},
      {"height", "cm", 50.0, 250.0, {{"in", 2.54, 0.0}, {"m", 100.0, 0.0}}},
      {"mean_blood_pressure", "mmHg", 20.0, 250.0, {{"kPa", 7.50062, 0.0}}},
      {"oxygen_saturation", "%", 50.0, 100.0, {{"fraction", 100.0, 0.0}}},
      {"ph", "pH", 6.5, 8.0, {}},
      {"respiratory_rate", "breaths/min", 1.0, 80.0, {}},
      {"systolic_blood_pressure", "mmHg", 40.0, 300.0, {{"kPa", 7.50062, 0.0}}},
      {"temperature", "C", 25.0, 45.0, {{"F", f_scale, f_offset}, {"K", 1.0, -273.15}}},
      {"weight", "kg", 20.0, 300.0, {{"lb", 0.45359237, 0.0}, {"g", 0.001, 0.0}}},
  });
}

namespace {

double ParseNumber(std::string_view s, size_t line_no) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParse, "catalog line " + std::to_string(line_no) +
                                       ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> Fields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

StructuredFeatureCatalog StructuredFeatureCatalog::Parse(std::string_view text) {
  std::vector<CatalogEntry> entries;
  size_t line_no = 0;
  for (std::string_view raw : Split(text, '\n')) {
    ++line_no;
    std::string_view line = Trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    std::vector<std::string_view> f = Fields(line);
    if (f.size() < 4) {
      throw Error(ErrorCode::kParse,
                  "catalog line " + std::to_string(line_no) + ": expected key unit lo hi");
    }
    CatalogEntry e;
    e.key = std::string(f[0]);
    e.canonical_unit = std::string(f[1]);
    e.lo = ParseNumber(f[2], line_no);
    e.hi = ParseNumber(f[3], line_no);
    for (size_t i = 4; i < f.size(); ++i) {
      // Split from the right so unit tags may contain ':'.
      std::string_view alias = f[i];
      size_t p2 = alias.rfind(':');
      size_t p1 = p2 == std::string_view::npos ? p2 : alias.rfind(':', p2 - 1);
      if (p1 == std::string_view::npos || p1 == 0) {
        throw Error(ErrorCode::kParse, "catalog line " + std::to_string(line_no) +
                                           ": alias must be unit:scale:offset");
      }
      e.aliases.push_back({std::string(alias.substr(0, p1)),
                           ParseNumber(alias.substr(p1 + 1, p2 - p1 - 1), line_no),
                           ParseNumber(alias.substr(p2 + 1), line_no)});
    }
    entries.push_back(std::move(e));
  }
  return StructuredFeatureCatalog(std::move(entries));
}

std::string StructuredFeatureCatalog::Serialize() const {
  std::ostringstream out;
  out << "# key\tunit\tlo\thi\t[alias:scale:offset ...]\n";
  for (const CatalogEntry& e : entries_) {
    out << e.key << '\t' << e.canonical_unit << '\t' << FormatDouble(e.lo) << '\t'
        << FormatDouble(e.hi);
    for (const UnitConversion& c : e.aliases) {
      out << '\t' << c.unit << ':' << FormatDouble(c.scale) << ':' << FormatDouble(c.offset);
    }
    out << '\n';
  }
  return out.str();
}

bool StructuredFeatureCatalog::Contains(std::string_view key) const {
  return index_.find(key) != index_.end();
}

const CatalogEntry& StructuredFeatureCatalog::Get(std::string_view key) const {
  auto it = index_.find(key);
  if (it == index_.end()) {
    throw Error(ErrorCode::kCatalog, "unknown structured feature '" + std::string(key) + "'");
  }
  return entries_[it->second];
}

NormalizedObservation NormalizeObservation(const StructuredObservation& obs,
                                           const StructuredFeatureCatalog& catalog) {
  const CatalogEntry& entry = catalog.Get(obs.feature);
  StructuredObservation out = obs;
  if (obs.unit != entry.canonical_unit) {
    const UnitConversion* conv = nullptr;
    for (const UnitConversion& c : entry.aliases) {
      if (c.unit == obs.unit) conv = &c;
    }
    if (conv == nullptr) {
      throw Error(ErrorCode::kUnit,
                  "unknown unit '" + obs.unit + "' for feature '" + obs.feature + "'");
    }
    out.value = conv->scale * obs.value + conv->offset;
    out.unit = entry.canonical_unit;
  }
  if (!std::isfinite(out.value) || out.value < entry.lo || out.value > entry.hi) {
    return Rejection{"out-of-range: " + obs.feature + " = " + FormatDouble(out.value) + " " +
                     entry.canonical_unit};
  }
  return out;
}

}  // namespace phenoid::corpus
