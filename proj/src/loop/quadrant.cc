#include "phenoid/loop/quadrant.h"

#include <algorithm>

#include "phenoid/common/error.h"
#include "phenoid/common/rng.h"

namespace phenoid::loop {

size_t QuadrantOf(bool predicted_positive, bool icd_positive) {
  return (predicted_positive ? 0 : 2) + (icd_positive ? 0 : 1);
}

std::vector<std::string> QuadrantSample::Ordered() const {
  std::vector<std::string> out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  out.insert(out.end(), fill.begin(), fill.end());
  return out;
}

size_t QuadrantSample::size() const {
  size_t n = fill.size();
  for (const auto& g : groups) n += g.size();
  return n;
}

nlohmann::json QuadrantSample::ToJson() const {
  nlohmann::json groups_json = nlohmann::json::array();
  for (const auto& g : groups) groups_json.push_back(g);
  return {{"groups", groups_json},
          {"group_sizes", group_sizes},
          {"fill", fill},
          {"shortfall", shortfall},
          {"reallocated", reallocated}};
}

QuadrantSample QuadrantSample::FromJson(const nlohmann::json& j) {
  QuadrantSample s;
  for (size_t q = 0; q < 4; ++q) {
    s.groups[q] = j.at("groups").at(q).get<std::vector<std::string>>();
    s.group_sizes[q] = j.at("group_sizes").at(q).get<size_t>();
  }
  s.fill = j.at("fill").get<std::vector<std::string>>();
  s.shortfall = j.at("shortfall").get<size_t>();
  s.reallocated = j.at("reallocated").get<size_t>();
  return s;
}

QuadrantSample SampleQuadrants(std::span<const std::string> ids,
                               std::span<const double> probabilities,
                               std::span<const int> icd_labels, size_t quota, uint64_t seed,
                               double threshold) {
  if (ids.empty()) throw Error(ErrorCode::kSample, "cannot sample from an empty corpus");
  if (ids.size() != probabilities.size() || ids.size() != icd_labels.size()) {
    throw Error(ErrorCode::kShape, "ids, predictions and labels differ in length");
  }
  std::array<std::vector<std::string>, 4> population;
  for (size_t i = 0; i < ids.size(); ++i) {
    population[QuadrantOf(probabilities[i] >= threshold, icd_labels[i] != 0)].push_back(ids[i]);
  }
  QuadrantSample out;
  std::array<std::vector<std::string>, 4> remaining;
  for (size_t q = 0; q < 4; ++q) {
    out.group_sizes[q] = population[q].size();
    Rng rng(DeriveSeed(seed, static_cast<uint64_t>(q)));
    std::vector<std::string> pool = population[q];
    rng.Shuffle(pool);
    const size_t take = std::min(quota, pool.size());
    out.groups[q].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    remaining[q].assign(pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end());
    out.shortfall += quota - take;
  }
  // Remaining members are already in seeded random order, so taking a prefix
  // of the largest remaining group is a random draw from it.
  size_t need = out.shortfall;
  while (need > 0) {
    size_t largest = 0;
    for (size_t q = 1; q < 4; ++q) {
      if (remaining[q].size() > remaining[largest].size()) largest = q;
    }
    if (remaining[largest].empty()) break;
    const size_t take = std::min(need, remaining[largest].size());
    auto& src = remaining[largest];
    out.fill.insert(out.fill.end(), src.begin(), src.begin() + static_cast<std::ptrdiff_t>(take));
    src.erase(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(take));
    need -= take;
    out.reallocated += take;
  }
  return out;
}

}  // namespace phenoid::loop
