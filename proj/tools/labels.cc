#include "labels.h"

#include <sstream>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::tools {

std::map<std::string, int> ParseLabels(std::string_view text) {
  std::map<std::string, int> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    if (line_no == 1 && trimmed.rfind("admission_id", 0) == 0) continue;
    const auto fields = Split(trimmed, ',');
    if (fields.size() != 2) {
      throw Error(ErrorCode::kParse, "labels line " + std::to_string(line_no) +
                                         ": expected admission_id,label");
    }
    const std::string_view value = Trim(fields[1]);
    if (value != "0" && value != "1") {
      throw Error(ErrorCode::kParse, "labels line " + std::to_string(line_no) +
                                         ": label must be 0 or 1");
    }
    const std::string id(Trim(fields[0]));
    if (!out.emplace(id, value == "1" ? 1 : 0).second) {
      throw Error(ErrorCode::kDuplicate, "duplicate label for " + id);
    }
  }
  return out;
}

std::string SerializeLabels(const std::map<std::string, int>& labels) {
  std::string out = "admission_id,label\n";
  for (const auto& [id, y] : labels) out += id + "," + std::to_string(y) + "\n";
  return out;
}

std::vector<int> AlignLabels(const features::FeatureMatrix& m,
                             const std::map<std::string, int>& labels) {
  std::vector<int> y;
  y.reserve(m.rows());
  for (const std::string& id : m.row_ids()) {
    auto it = labels.find(id);
    if (it == labels.end()) throw Error(ErrorCode::kShape, "no label for admission " + id);
    y.push_back(it->second);
  }
  return y;
}

}  // namespace phenoid::tools
