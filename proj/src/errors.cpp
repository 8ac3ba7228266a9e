#include "svmlab/errors.hpp"

namespace svmlab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::LabelCardinality: return "LabelCardinality";
        case ErrorKind::EmptyFile: return "EmptyFile";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::SingleClass: return "SingleClass";
        case ErrorKind::DegenerateClass: return "DegenerateClass";
        case ErrorKind::TooFewSamples: return "TooFewSamples";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::DegenerateProblem: return "DegenerateProblem";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::AssumptionViolated: return "AssumptionViolated";
        case ErrorKind::NoSupportVectors: return "NoSupportVectors";
        case ErrorKind::NotLinear: return "NotLinear";
        case ErrorKind::NotSeparable: return "NotSeparable";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::AllCoincident: return "AllCoincident";
        case ErrorKind::RegimeViolation: return "RegimeViolation";
        case ErrorKind::EmptyMatrix: return "EmptyMatrix";
        case ErrorKind::NotTwoDimensional: return "NotTwoDimensional";
    }
    return "Unknown";
}

bool is_input_error(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::MalformedRow:
        case ErrorKind::LabelCardinality:
        case ErrorKind::EmptyFile:
        case ErrorKind::IoError:
        case ErrorKind::SchemaMismatch:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::LengthMismatch:
        case ErrorKind::NotTwoDimensional:
        case ErrorKind::TooFewSamples:
        case ErrorKind::SingleClass:
        case ErrorKind::DegenerateClass:
        case ErrorKind::AllCoincident:
        case ErrorKind::NotLinear:
        case ErrorKind::RegimeViolation:
            return true;
        default:
            return false;
    }
}

Error::Error(ErrorKind kind, const std::string &message) :
    std::runtime_error{ std::string{ to_string(kind) } + ": " + message },
    kind_{ kind } {}

}  // namespace svmlab
