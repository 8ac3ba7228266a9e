#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace svmlab {

/// Failure categories raised across the library. The CLI maps them onto
/// exit codes (input errors vs computational failures).
enum class ErrorKind {
    InvalidArgument,
    MalformedRow,
    LabelCardinality,
    EmptyFile,
    IoError,
    SchemaMismatch,
    SingleClass,
    DegenerateClass,
    TooFewSamples,
    DimensionMismatch,
    LengthMismatch,
    DegenerateProblem,
    SingularSystem,
    AssumptionViolated,
    NoSupportVectors,
    NotLinear,
    NotSeparable,
    DomainError,
    AllCoincident,
    RegimeViolation,
    EmptyMatrix,
    NotTwoDimensional,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for kinds caused by the input data or arguments rather than by the numerics.
bool is_input_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

}  // namespace svmlab
