#include "phenoid/corpus/icd.h"

#include <cctype>

#include "phenoid/common/error.h"

namespace phenoid::corpus {

namespace {

bool AllDigits(std::string_view s) {
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

bool IcdCode::IsValid(std::string_view code) {
  const size_t dot = code.find('.');
  const std::string_view head = code.substr(0, dot);
  bool head_ok = false;
  if (head.size() == 3 && AllDigits(head)) head_ok = true;
  if (head.size() == 3 && head[0] == 'V' && AllDigits(head.substr(1))) head_ok = true;
  if (head.size() == 4 && head[0] == 'E' && AllDigits(head.substr(1))) head_ok = true;
  if (!head_ok) return false;
  if (dot == std::string_view::npos) return true;
  const std::string_view tail = code.substr(dot + 1);
  if (tail.empty() || tail.size() > 2) return false;
  for (char c : tail) {
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

IcdCode IcdCode::Parse(std::string_view raw) {
  std::string code;
  code.reserve(raw.size());
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    code.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (!IsValid(code)) {
    throw Error(ErrorCode::kParse, "malformed ICD-9 code '" + std::string(raw) + "'");
  }
  return IcdCode(std::move(code));
}

std::string_view IcdCode::category() const {
  std::string_view s(code_);
  return s.substr(0, s.find('.'));
}

std::optional<int> IcdCode::numeric_category() const {
  std::string_view cat = category();
  if (cat.size() != 3 || !AllDigits(cat)) return std::nullopt;
  return (cat[0] - '0') * 100 + (cat[1] - '0') * 10 + (cat[2] - '0');
}

bool IcdCode::IsSubcodeOf(std::string_view parent) const {
  return IsSubcode(code_, parent);
}

bool IsSubcode(std::string_view code, std::string_view parent) {
  if (code == parent) return true;
  return code.size() > parent.size() && code.substr(0, parent.size()) == parent &&
         code[parent.size()] == '.';
}

}  // namespace phenoid::corpus
