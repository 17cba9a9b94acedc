#pragma once

#include <stdexcept>

namespace pelastica {

// Argument outside the admissible domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A numerical scheme failed to reach the requested accuracy.
struct ToleranceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Initial data that admits more than one solution family.
struct AmbiguityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exponent fit impossible (samples underflowed or degenerate).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pelastica
