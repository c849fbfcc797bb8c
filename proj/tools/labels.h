#ifndef PHENOID_TOOLS_LABELS_H_
#define PHENOID_TOOLS_LABELS_H_

#include <map>
#include <string>
#include <vector>

#include "phenoid/features/matrix.h"

namespace phenoid::tools {

// Two-column CSV "admission_id,label" with a header row; label is 0 or 1.
std::map<std::string, int> ParseLabels(std::string_view text);
std::string SerializeLabels(const std::map<std::string, int>& labels);

// Labels aligned to the matrix rows; a row without a label is an error.
std::vector<int> AlignLabels(const features::FeatureMatrix& m,
                             const std::map<std::string, int>& labels);

}  // namespace phenoid::tools

#endif  // PHENOID_TOOLS_LABELS_H_
