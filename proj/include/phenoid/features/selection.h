#ifndef PHENOID_FEATURES_SELECTION_H_
#define PHENOID_FEATURES_SELECTION_H_

#include <span>
#include <string>
#include <vector>

#include "phenoid/features/matrix.h"

namespace phenoid::features {

enum class SelectionMethod { kMutualInformation, kAbsPointBiserial };

// Plug-in mutual information (nats) between a column and binary labels.
// Phenotype columns use their two values; structured columns are cut into
// 10 quantile bins, with missing cells as an extra bin.
double MutualInformationScore(const FeatureMatrix& m, size_t column, std::span<const int> labels);
// |Pearson correlation| between a column and the labels; 0 for constant
// columns. Missing cells are skipped.
double AbsPointBiserialScore(const FeatureMatrix& m, size_t column, std::span<const int> labels);

struct ScoredColumn {
  std::string name;
  double score = 0.0;
};

// Scores every column (or only those in `restrict_to`, when non-empty),
// sorted by descending score with lexicographic tie-break.
std::vector<ScoredColumn> ScoreColumns(const FeatureMatrix& m, std::span<const int> labels,
                                       SelectionMethod method,
                                       std::span<const std::string> restrict_to = {});

// Top-k columns, returned in matrix column order. k larger than the number of
// candidate columns keeps all of them. Constant labels -> Error(kSelection).
FeatureMask SelectTopK(const FeatureMatrix& m, std::span<const int> labels, size_t k,
                       SelectionMethod method, std::span<const std::string> restrict_to = {});

}  // namespace phenoid::features

#endif  // PHENOID_FEATURES_SELECTION_H_
