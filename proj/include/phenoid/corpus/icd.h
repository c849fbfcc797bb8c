#ifndef PHENOID_CORPUS_ICD_H_
#define PHENOID_CORPUS_ICD_H_

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace phenoid::corpus {

// An ICD-9 diagnosis code, normalized to uppercase without whitespace.
// Accepted shapes: "ddd", "Vdd", "Eddd", each optionally followed by "." and
// one or two further characters.
class IcdCode {
 public:
  // Throws Error(kParse) on malformed input.
  static IcdCode Parse(std::string_view raw);
  static bool IsValid(std::string_view normalized);

  const std::string& str() const { return code_; }
  // The part before the dot ("162" for "162.9").
  std::string_view category() const;
  // Numeric value of the category for plain numeric codes; nullopt for V/E codes.
  std::optional<int> numeric_category() const;

  bool IsSubcodeOf(std::string_view parent) const;

  auto operator<=>(const IcdCode&) const = default;

 private:
  explicit IcdCode(std::string code) : code_(std::move(code)) {}
  std::string code_;
};

// Prefix-with-dot relation: "162.9" is a subcode of "162", "162" of itself,
// "1620" is not a subcode of "162".
bool IsSubcode(std::string_view code, std::string_view parent);

}  // namespace phenoid::corpus

#endif  // PHENOID_CORPUS_ICD_H_
