#ifndef PHENOID_FEATURES_MATRIX_H_
#define PHENOID_FEATURES_MATRIX_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phenoid/common/parallel.h"
#include "phenoid/corpus/admission.h"
#include "phenoid/corpus/catalog.h"
#include "phenoid/hpo/extractor.h"

namespace phenoid::features {

// Row-major dense matrix.
struct DenseMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(size_t r) const { return {data.data() + r * cols, cols}; }
  std::span<double> row(size_t r) { return {data.data() + r * cols, cols}; }
};

enum class ColumnKind { kPhenotype, kStructured };

// Named-column design matrix: phenotype columns are 0/1 and named by HPO id;
// structured columns are named by catalog key and may be missing.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> column_names, std::vector<ColumnKind> kinds,
                std::vector<std::string> row_ids);

  size_t rows() const { return values_.rows; }
  size_t cols() const { return values_.cols; }
  const std::vector<std::string>& column_names() const { return column_names_; }
  const std::vector<ColumnKind>& kinds() const { return kinds_; }
  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const DenseMatrix& values() const { return values_; }

  double at(size_t r, size_t c) const { return values_.at(r, c); }
  bool missing(size_t r, size_t c) const { return missing_[r * cols() + c] != 0; }
  void Set(size_t r, size_t c, double v);
  void SetMissing(size_t r, size_t c);

  std::optional<size_t> ColumnIndex(std::string_view name) const;
  std::optional<size_t> RowIndex(std::string_view id) const;
  bool HasMissing() const;

  FeatureMatrix SelectRows(std::span<const size_t> rows) const;
  // Columns in the order given; unknown names -> Error(kMask).
  FeatureMatrix SelectColumns(std::span<const std::string> names) const;

  // Header "admission_id,<columns>"; missing cells are empty.
  std::string ToCsv() const;
  // Columns named "HP:NNNNNNN" are phenotype columns, the rest structured.
  static FeatureMatrix FromCsv(std::string_view text);

  bool operator==(const FeatureMatrix& o) const;

 private:
  std::vector<std::string> column_names_;
  std::vector<ColumnKind> kinds_;
  std::vector<std::string> row_ids_;
  DenseMatrix values_;
  std::vector<uint8_t> missing_;
  std::map<std::string, size_t, std::less<>> column_index_;
};

// Active column subset, kept in matrix column order.
struct FeatureMask {
  std::vector<std::string> active;

  bool Contains(std::string_view name) const;
  static FeatureMask All(const FeatureMatrix& m);
};

struct BuildOptions {
  Execution execution = Execution::kParallel;
  // When non-empty, phenotype columns are exactly these ids (sorted);
  // otherwise the sorted union of ids extracted from the corpus.
  std::vector<std::string> phenotype_columns;
};

struct BuiltMatrix {
  FeatureMatrix matrix;
  std::vector<hpo::ExtractionResult> extractions;  // aligned to rows
  size_t rejected_observations = 0;
};

// One row per admission: phenotype column = 1 iff the id is in the
// extractor's non-negated set; structured column = admission mean or missing.
BuiltMatrix BuildMatrix(const std::vector<corpus::EhrAdmission>& corpus,
                        const hpo::PhenotypeExtractor& extractor,
                        const corpus::StructuredFeatureCatalog& catalog,
                        const BuildOptions& options = {});

}  // namespace phenoid::features

#endif  // PHENOID_FEATURES_MATRIX_H_
