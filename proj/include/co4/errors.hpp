#pragma once

#include <stdexcept>

namespace co4 {

// Shape or size mismatch between operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument value outside its admissible range.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Configuration problem; the message names the offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace co4
