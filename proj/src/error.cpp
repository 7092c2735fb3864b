#include <cbnt/error.hpp>

namespace cbnt {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::InvalidAlphabet: return "InvalidAlphabet";
    case ErrorCode::SetsOverlap: return "SetsOverlap";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::TooLargeToEnumerate: return "TooLargeToEnumerate";
    case ErrorCode::VertexNotInSupport: return "VertexNotInSupport";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::DegenerateParams: return "DegenerateParams";
    case ErrorCode::IterationBudgetExceeded: return "IterationBudgetExceeded";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::BudgetMismatch: return "BudgetMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NotCovering: return "NotCovering";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace cbnt
