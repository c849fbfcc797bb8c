#ifndef PHENOID_LOOP_QUADRANT_H_
#define PHENOID_LOOP_QUADRANT_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace phenoid::loop {

// Group order: (pred+, icd+), (pred+, icd-), (pred-, icd+), (pred-, icd-).
inline constexpr std::array<const char*, 4> kQuadrantNames = {"pred+/icd+", "pred+/icd-",
                                                              "pred-/icd+", "pred-/icd-"};

size_t QuadrantOf(bool predicted_positive, bool icd_positive);

struct QuadrantSample {
  std::array<std::vector<std::string>, 4> groups;  // each at most quota ids
  std::array<size_t, 4> group_sizes{};             // population of each group
  // Ids drawn to cover short groups, taken from the largest remaining groups.
  std::vector<std::string> fill;
  size_t shortfall = 0;    // quota slots short groups could not fill themselves
  size_t reallocated = 0;  // of those, slots covered by `fill`

  // Quadrant-major order: the four groups, then the fill ids.
  std::vector<std::string> Ordered() const;
  size_t size() const;
  bool operator==(const QuadrantSample&) const = default;

  nlohmann::json ToJson() const;
  static QuadrantSample FromJson(const nlohmann::json& j);
};

// Predicted positive iff probability >= threshold. Within each group,
// min(quota, size) ids are drawn without replacement by seed. Empty input ->
// Error(kSample); misaligned inputs -> Error(kShape).
QuadrantSample SampleQuadrants(std::span<const std::string> ids,
                               std::span<const double> probabilities,
                               std::span<const int> icd_labels, size_t quota, uint64_t seed,
                               double threshold = 0.5);

}  // namespace phenoid::loop

#endif  // PHENOID_LOOP_QUADRANT_H_
