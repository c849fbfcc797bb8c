#ifndef PHENOID_CORPUS_CATALOG_H_
#define PHENOID_CORPUS_CATALOG_H_

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace phenoid::corpus {

// canonical = scale * value + offset
struct UnitConversion {
  std::string unit;
  double scale = 1.0;
  double offset = 0.0;
};

struct CatalogEntry {
  std::string key;
  std::string canonical_unit;
  double lo = 0.0;  // plausible range, inclusive
  double hi = 0.0;
  std::vector<UnitConversion> aliases;
};

struct StructuredObservation {
  std::string feature;
  int timestamp = 0;
  double value = 0.0;
  std::string unit;

  bool operator==(const StructuredObservation&) const = default;
};

struct Rejection {
  std::string reason;
};

using NormalizedObservation = std::variant<StructuredObservation, Rejection>;

class StructuredFeatureCatalog {
 public:
  StructuredFeatureCatalog() = default;
  // Validates: unique keys, lo < hi, nonzero scales, distinct unit tags.
  explicit StructuredFeatureCatalog(std::vector<CatalogEntry> entries);

  // The 17 default clinical variables (vitals, Glasgow coma components,
  // glucose, pH, height, weight, ...).
  static StructuredFeatureCatalog Default();
  // Whitespace-separated lines: key unit lo hi [alias:scale:offset ...];
  // '#' starts a comment.
  static StructuredFeatureCatalog Parse(std::string_view text);
  std::string Serialize() const;

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool Contains(std::string_view key) const;
  // Throws Error(kCatalog) for unknown keys.
  const CatalogEntry& Get(std::string_view key) const;

 private:
  std::vector<CatalogEntry> entries_;
  std::map<std::string, size_t, std::less<>> index_;
};

// Converts to the canonical unit and range-checks the result.
// Unknown feature -> Error(kCatalog); unknown unit -> Error(kUnit).
NormalizedObservation NormalizeObservation(const StructuredObservation& obs,
                                           const StructuredFeatureCatalog& catalog);

}  // namespace phenoid::corpus

#endif  // PHENOID_CORPUS_CATALOG_H_
