#include "phenoid/hpo/ontology.h"

#include <cctype>
#include <fstream>
#include <functional>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"

namespace phenoid::hpo {

bool IsHpoId(std::string_view id) {
  if (id.size() != 10 || id.substr(0, 3) != "HP:") return false;
  for (char c : id.substr(3)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Ontology::Ontology(std::vector<HpoTerm> terms) {
  for (HpoTerm& t : terms) {
    if (!IsHpoId(t.id)) throw Error(ErrorCode::kParse, "malformed HPO id '" + t.id + "'");
    if (t.name.empty()) throw Error(ErrorCode::kParse, "term " + t.id + " has no name");
    std::string id = t.id;
    if (!terms_.emplace(id, std::move(t)).second) {
      throw Error(ErrorCode::kDuplicate, "duplicate term " + id);
    }
  }
  for (const auto& [id, t] : terms_) {
    for (const std::string& p : t.parents) {
      if (p == id) throw Error(ErrorCode::kCycle, "term " + id + " is its own parent");
      if (!terms_.count(p)) {
        throw Error(ErrorCode::kLookup, "term " + id + " has unknown parent " + p);
      }
    }
  }
  // Three-color DFS for cycles.
  std::map<std::string, int> color;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    color[id] = 1;
    for (const std::string& p : terms_.at(id).parents) {
      int c = color[p];
      if (c == 1) throw Error(ErrorCode::kCycle, "is_a cycle through " + p);
      if (c == 0) visit(p);
    }
    color[id] = 2;
  };
  for (const auto& [id, t] : terms_) {
    if (color[id] == 0) visit(id);
  }
}

Ontology Ontology::Parse(std::istream& in) {
  std::vector<HpoTerm> terms;
  bool in_term = false;
  HpoTerm current;
  size_t stanza_line = 0;
  auto flush = [&]() {
    if (!in_term) return;
    if (current.id.empty() || current.name.empty()) {
      throw Error(ErrorCode::kParse,
                  "stanza at line " + std::to_string(stanza_line) + " lacks id or name");
    }
    terms.push_back(std::move(current));
    current = HpoTerm{};
  };
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line[0] == '!') continue;
    if (line.front() == '[') {
      flush();
      in_term = line == "[Term]";
      stanza_line = line_no;
      continue;
    }
    if (!in_term) continue;
    size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    std::string_view tag = Trim(line.substr(0, colon));
    std::string_view value = Trim(line.substr(colon + 1));
    if (tag == "id") {
      current.id = std::string(value);
    } else if (tag == "name") {
      current.name = std::string(value);
    } else if (tag == "synonym") {
      size_t open = value.find('"');
      size_t close = open == std::string_view::npos ? open : value.find('"', open + 1);
      if (close == std::string_view::npos) {
        throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": unquoted synonym");
      }
      current.synonyms.emplace_back(value.substr(open + 1, close - open - 1));
    } else if (tag == "is_a") {
      std::string_view parent = value.substr(0, value.find_first_of(" \t!"));
      current.parents.emplace_back(parent);
    }
  }
  flush();
  return Ontology(std::move(terms));
}

Ontology Ontology::ParseFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open ontology " + path);
  return Parse(in);
}

const HpoTerm& Ontology::Get(std::string_view id) const {
  auto it = terms_.find(std::string(id));
  if (it == terms_.end()) throw Error(ErrorCode::kLookup, "unknown HPO term " + std::string(id));
  return it->second;
}

std::set<std::string> Ontology::Ancestors(std::string_view id) const {
  std::set<std::string> out;
  std::vector<std::string> stack = Get(id).parents;
  while (!stack.empty()) {
    std::string p = std::move(stack.back());
    stack.pop_back();
    if (!out.insert(p).second) continue;
    for (const std::string& gp : terms_.at(p).parents) stack.push_back(gp);
  }
  return out;
}

}  // namespace phenoid::hpo
