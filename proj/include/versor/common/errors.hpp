#pragma once

#include <stdexcept>
#include <string>

namespace versor {

// Contract violations (bad masks, mismatched signatures, malformed inputs).
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerically singular operand where an inverse was required.
struct SingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cayley map hit its excluded set: (2 + B) not invertible, i.e. B has an
// eigenvalue at -2 under left multiplication.
struct CayleySingularError : SingularError {
  explicit CayleySingularError(const std::string& what) : SingularError(what) {}
};

// Multivector with (near-)zero scalar norm cannot be projected back to the
// rotor manifold.
struct DegenerateStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace versor
