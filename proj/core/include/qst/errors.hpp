#pragma once

#include <stdexcept>

namespace qst {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values: non-finite numbers, malformed flags, empty grids.
struct InputError : Error {
    using Error::Error;
};

// Mismatched dimensions or violated call preconditions.
struct ContractError : Error {
    using Error::Error;
};

// Parameter combinations that make a formula degenerate
// (vanishing denominators, zero oscillation frequency).
struct SingularParameterError : Error {
    using Error::Error;
};

// gamma >= 2*sqrt(Gamma_a^2 + Gamma_b^2): the damped oscillation
// frequency Lambda is no longer real and the closed forms do not apply.
struct OverdampedError : Error {
    using Error::Error;
};

}  // namespace qst
