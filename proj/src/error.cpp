#include "hkernel/error.hpp"

namespace hkernel {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownColour: return "UnknownColour";
    case ErrorCode::DuplicateColour: return "DuplicateColour";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::DuplicateVertex: return "DuplicateVertex";
    case ErrorCode::LoopArc: return "LoopArc";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SameVertex: return "SameVertex";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotTransitive: return "NotTransitive";
    case ErrorCode::NotReflexive: return "NotReflexive";
    case ErrorCode::NotTwins: return "NotTwins";
    case ErrorCode::OddCycleInComplement: return "OddCycleInComplement";
    case ErrorCode::NotOddCycle: return "NotOddCycle";
    case ErrorCode::NotInComplement: return "NotInComplement";
    case ErrorCode::MissingBaseWitness: return "MissingBaseWitness";
    case ErrorCode::PatternMismatch: return "PatternMismatch";
    case ErrorCode::BoundTooLarge: return "BoundTooLarge";
    case ErrorCode::Interrupted: return "Interrupted";
    case ErrorCode::StaleState: return "StaleState";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidCertificate: return "InvalidCertificate";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace hkernel
