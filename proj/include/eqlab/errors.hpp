#pragma once

#include <stdexcept>
#include <string>

namespace eqlab {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ValenceMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A derivative was requested from a jet whose truncation order is already 0.
struct OrderExhausted : std::domain_error {
    using std::domain_error::domain_error;
};

struct NotInvertible : std::domain_error {
    using std::domain_error::domain_error;
};

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace eqlab
