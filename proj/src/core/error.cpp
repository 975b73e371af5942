#include "core/error.hpp"

namespace mvrp {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingKeyword: return "MissingKeyword";
        case ErrorCode::DuplicateNodeId: return "DuplicateNodeId";
        case ErrorCode::DemandExceedsCapacity: return "DemandExceedsCapacity";
        case ErrorCode::BadEta: return "BadEta";
        case ErrorCode::UnknownCustomer: return "UnknownCustomer";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::PlatoonTooLarge: return "PlatoonTooLarge";
        case ErrorCode::NoFeasiblePath: return "NoFeasiblePath";
        case ErrorCode::InfeasibleSparse: return "InfeasibleSparse";
        case ErrorCode::NothingToShake: return "NothingToShake";
        case ErrorCode::NoAdmissibleMove: return "NoAdmissibleMove";
        case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace mvrp
