#pragma once

#include <stdexcept>
#include <string>

namespace qstorage {

/// Base class for all library errors. `code()` is a stable machine-readable
/// identifier used in the CLI's error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define QSTORAGE_DEFINE_ERROR(Name, code_string)                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& message) : Error(code_string, message) {} \
  }

QSTORAGE_DEFINE_ERROR(ContractViolation, "contract_violation");
QSTORAGE_DEFINE_ERROR(OutOfRange, "out_of_range");
QSTORAGE_DEFINE_ERROR(InsufficientData, "insufficient_data");
QSTORAGE_DEFINE_ERROR(DegenerateSetting, "degenerate_setting");
QSTORAGE_DEFINE_ERROR(IncompleteData, "informationally_incomplete");
QSTORAGE_DEFINE_ERROR(SizingError, "sizing_error");
QSTORAGE_DEFINE_ERROR(GeometryError, "invalid_geometry");
QSTORAGE_DEFINE_ERROR(SchemaError, "schema_error");
QSTORAGE_DEFINE_ERROR(AnalysisFailure, "analysis_failure");
QSTORAGE_DEFINE_ERROR(MissingInput, "missing_input");

#undef QSTORAGE_DEFINE_ERROR

}  // namespace qstorage
