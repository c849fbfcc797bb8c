#include "phenoid/common/error.h"

namespace phenoid {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kUnit: return "unit_error";
    case ErrorCode::kCatalog: return "catalog_error";
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kLookup: return "lookup_error";
    case ErrorCode::kFit: return "fit_error";
    case ErrorCode::kData: return "data_error";
    case ErrorCode::kBudget: return "budget_error";
    case ErrorCode::kSize: return "size_error";
    case ErrorCode::kMask: return "mask_error";
    case ErrorCode::kSelection: return "selection_error";
    case ErrorCode::kShape: return "shape_error";
    case ErrorCode::kUndefinedMetric: return "undefined_metric";
    case ErrorCode::kSample: return "sample_error";
    case ErrorCode::kQueue: return "queue_error";
    case ErrorCode::kInsufficientLabels: return "insufficient_labels";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kCycle: return "cycle_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kDegenerate: return "degenerate";
  }
  return "unknown";
}

bool IsValidationError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kDegenerate:
      return false;
    default:
      return true;
  }
}

}  // namespace phenoid
