#pragma once

#include <stdexcept>
#include <string>

namespace hg {

enum class ErrorCode {
    DimensionMismatch,
    InvalidArgument,
    InvalidStructure,
    NotStratified,
    GradingViolation,
    JacobiViolation,
    SpecMismatch,
    UnsupportedStep,
    ResolutionError,
    NonzeroMean,
    SmallnessViolation,
    DegreeError,
    UnsupportedDegree,
    ContractViolation,
    MaxIterExceeded,
    DecompositionResidual,
    ConfigError,
    IoError,
    UnknownKind,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode c, const std::string& what)
        : std::runtime_error(std::string(error_name(c)) + ": " + what), code_(c) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace hg
