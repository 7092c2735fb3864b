#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbnt {

enum class ErrorCode {
    CycleDetected,
    SelfLoop,
    DuplicateEdge,
    VertexOutOfRange,
    InvalidAlphabet,
    SetsOverlap,
    InvalidModel,
    TooLargeToEnumerate,
    VertexNotInSupport,
    PreconditionViolated,
    DegenerateParams,
    IterationBudgetExceeded,
    SupportMismatch,
    BudgetMismatch,
    InsufficientSamples,
    NotCovering,
    BadDimensions,
    ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace cbnt
