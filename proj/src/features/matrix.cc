#include "phenoid/features/matrix.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"
#include "phenoid/hpo/ontology.h"

namespace phenoid::features {

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names, std::vector<ColumnKind> kinds,
                             std::vector<std::string> row_ids)
    : column_names_(std::move(column_names)),
      kinds_(std::move(kinds)),
      row_ids_(std::move(row_ids)),
      values_(row_ids_.size(), column_names_.size()),
      missing_(row_ids_.size() * column_names_.size(), 0) {
  if (kinds_.size() != column_names_.size()) {
    throw Error(ErrorCode::kShape, "column kinds and names differ in length");
  }
  for (size_t c = 0; c < column_names_.size(); ++c) {
    if (!column_index_.emplace(column_names_[c], c).second) {
      throw Error(ErrorCode::kShape, "duplicate column '" + column_names_[c] + "'");
    }
  }
}

void FeatureMatrix::Set(size_t r, size_t c, double v) {
  if (kinds_[c] == ColumnKind::kPhenotype && v != 0.0 && v != 1.0) {
    throw Error(ErrorCode::kData, "phenotype column " + column_names_[c] + " must be 0/1");
  }
  values_.at(r, c) = v;
  missing_[r * cols() + c] = 0;
}

void FeatureMatrix::SetMissing(size_t r, size_t c) {
  if (kinds_[c] == ColumnKind::kPhenotype) {
    throw Error(ErrorCode::kData, "phenotype column " + column_names_[c] + " cannot be missing");
  }
  values_.at(r, c) = 0.0;
  missing_[r * cols() + c] = 1;
}

std::optional<size_t> FeatureMatrix::ColumnIndex(std::string_view name) const {
  auto it = column_index_.find(name);
  if (it == column_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> FeatureMatrix::RowIndex(std::string_view id) const {
  for (size_t r = 0; r < row_ids_.size(); ++r) {
    if (row_ids_[r] == id) return r;
  }
  return std::nullopt;
}

bool FeatureMatrix::HasMissing() const {
  return std::any_of(missing_.begin(), missing_.end(), [](uint8_t m) { return m != 0; });
}

FeatureMatrix FeatureMatrix::SelectRows(std::span<const size_t> rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (size_t r : rows) ids.push_back(row_ids_.at(r));
  FeatureMatrix out(column_names_, kinds_, std::move(ids));
  for (size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(values_.row(rows[i]).begin(), cols(), out.values_.row(i).begin());
    std::copy_n(missing_.begin() + rows[i] * cols(), cols(), out.missing_.begin() + i * cols());
  }
  return out;
}

FeatureMatrix FeatureMatrix::SelectColumns(std::span<const std::string> names) const {
  std::vector<size_t> idx;
  std::vector<ColumnKind> kinds;
  for (const std::string& n : names) {
    auto c = ColumnIndex(n);
    if (!c) throw Error(ErrorCode::kMask, "unknown column '" + n + "'");
    idx.push_back(*c);
    kinds.push_back(kinds_[*c]);
  }
  FeatureMatrix out({names.begin(), names.end()}, std::move(kinds), row_ids_);
  for (size_t r = 0; r < rows(); ++r) {
    for (size_t j = 0; j < idx.size(); ++j) {
      out.values_.at(r, j) = values_.at(r, idx[j]);
      out.missing_[r * idx.size() + j] = missing_[r * cols() + idx[j]];
    }
  }
  return out;
}

std::string FeatureMatrix::ToCsv() const {
  std::string out = "admission_id";
  for (const std::string& c : column_names_) out += "," + c;
  out += '\n';
  for (size_t r = 0; r < rows(); ++r) {
    out += row_ids_[r];
    for (size_t c = 0; c < cols(); ++c) {
      out += ',';
      if (!missing(r, c)) out += FormatDouble(values_.at(r, c));
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix FeatureMatrix::FromCsv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::string_view l : Split(text, '\n')) {
    if (!Trim(l).empty()) lines.push_back(l);
  }
  if (lines.empty()) throw Error(ErrorCode::kParse, "empty matrix file");
  std::vector<std::string_view> header = Split(Trim(lines[0]), ',');
  if (header.empty() || header[0] != "admission_id") {
    throw Error(ErrorCode::kParse, "matrix header must start with admission_id");
  }
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;
  for (size_t i = 1; i < header.size(); ++i) {
    names.emplace_back(header[i]);
    kinds.push_back(hpo::IsHpoId(header[i]) ? ColumnKind::kPhenotype : ColumnKind::kStructured);
  }
  std::vector<std::string> ids;
  std::vector<std::vector<std::string_view>> cells;
  for (size_t l = 1; l < lines.size(); ++l) {
    auto f = Split(Trim(lines[l]), ',');
    if (f.size() != header.size()) {
      throw Error(ErrorCode::kParse, "matrix line " + std::to_string(l + 1) + ": expected " +
                                         std::to_string(header.size()) + " fields");
    }
    ids.emplace_back(f[0]);
    cells.push_back(std::move(f));
  }
  FeatureMatrix m(std::move(names), std::move(kinds), std::move(ids));
  for (size_t r = 0; r < cells.size(); ++r) {
    for (size_t c = 0; c < m.cols(); ++c) {
      std::string_view cell = cells[r][c + 1];
      if (cell.empty()) {
        m.SetMissing(r, c);
        continue;
      }
      double v = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::kParse, "matrix line " + std::to_string(r + 2) + ": bad number '" +
                                           std::string(cell) + "'");
      }
      m.Set(r, c, v);
    }
  }
  return m;
}

bool FeatureMatrix::operator==(const FeatureMatrix& o) const {
  return column_names_ == o.column_names_ && kinds_ == o.kinds_ && row_ids_ == o.row_ids_ &&
         values_.data == o.values_.data && missing_ == o.missing_;
}

bool FeatureMask::Contains(std::string_view name) const {
  return std::find(active.begin(), active.end(), name) != active.end();
}

FeatureMask FeatureMask::All(const FeatureMatrix& m) { return FeatureMask{m.column_names()}; }

BuiltMatrix BuildMatrix(const std::vector<corpus::EhrAdmission>& corpus,
                        const hpo::PhenotypeExtractor& extractor,
                        const corpus::StructuredFeatureCatalog& catalog,
                        const BuildOptions& options) {
  const long n = static_cast<long>(corpus.size());
  BuiltMatrix out;
  out.extractions.resize(corpus.size());
  std::vector<std::map<std::string, double>> aggregates(corpus.size());
  std::vector<size_t> rejected(corpus.size(), 0);

  auto process = [&](long i) {
    const corpus::EhrAdmission& a = corpus[static_cast<size_t>(i)];
    out.extractions[static_cast<size_t>(i)] = extractor.Extract(a.note_text);
    corpus::NormalizedAdmission norm = corpus::NormalizeAdmission(a, catalog);
    rejected[static_cast<size_t>(i)] = norm.rejections.size();
    aggregates[static_cast<size_t>(i)] = corpus::AggregateAdmission(norm.kept);
  };
  if (options.execution == Execution::kParallel) {
    // Exceptions cannot cross the OpenMP region; capture the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) {
      try {
        process(i);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (long i = 0; i < n; ++i) process(i);
  }

  std::vector<std::string> phenotypes = options.phenotype_columns;
  if (phenotypes.empty()) {
    std::set<std::string> seen;
    for (const auto& e : out.extractions) seen.insert(e.ids.begin(), e.ids.end());
    phenotypes.assign(seen.begin(), seen.end());
  } else {
    std::sort(phenotypes.begin(), phenotypes.end());
  }
  std::vector<std::string> names = phenotypes;
  std::vector<ColumnKind> kinds(phenotypes.size(), ColumnKind::kPhenotype);
  for (const corpus::CatalogEntry& e : catalog.entries()) {
    names.push_back(e.key);
    kinds.push_back(ColumnKind::kStructured);
  }
  std::vector<std::string> ids;
  for (const auto& a : corpus) ids.push_back(a.admission_id);
  FeatureMatrix m(std::move(names), std::move(kinds), std::move(ids));
  for (size_t r = 0; r < corpus.size(); ++r) {
    for (size_t c = 0; c < phenotypes.size(); ++c) {
      m.Set(r, c, out.extractions[r].ids.count(phenotypes[c]) ? 1.0 : 0.0);
    }
    for (size_t k = 0; k < catalog.size(); ++k) {
      const size_t c = phenotypes.size() + k;
      auto it = aggregates[r].find(catalog.entries()[k].key);
      if (it == aggregates[r].end()) {
        m.SetMissing(r, c);
      } else {
        m.Set(r, c, it->second);
      }
    }
    out.rejected_observations += rejected[r];
  }
  out.matrix = std::move(m);
  return out;
}

}  // namespace phenoid::features
