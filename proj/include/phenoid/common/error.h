#ifndef PHENOID_COMMON_ERROR_H_
#define PHENOID_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace phenoid {

enum class ErrorCode {
  kParse,
  kDuplicate,
  kUnit,
  kCatalog,
  kConfig,
  kLookup,
  kFit,
  kData,
  kBudget,
  kSize,
  kMask,
  kSelection,
  kShape,
  kUndefinedMetric,
  kSample,
  kQueue,
  kInsufficientLabels,
  kConflict,
  kNotFound,
  kValidation,
  kCycle,
  kIo,
  kDegenerate,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as Error; the code lets callers (CLI exit
// codes, HTTP status mapping) classify without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// True for failures caused by bad user input rather than internal faults.
bool IsValidationError(ErrorCode code);

}  // namespace phenoid

#endif  // PHENOID_COMMON_ERROR_H_
