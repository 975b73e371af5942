#pragma once

#include <stdexcept>
#include <string>

namespace mvrp {

enum class ErrorCode {
    ParseError,
    MissingKeyword,
    DuplicateNodeId,
    DemandExceedsCapacity,
    BadEta,
    UnknownCustomer,
    InvariantViolation,
    PlatoonTooLarge,
    NoFeasiblePath,
    InfeasibleSparse,
    NothingToShake,
    NoAdmissibleMove,
    InstanceTooLarge,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mvrp
