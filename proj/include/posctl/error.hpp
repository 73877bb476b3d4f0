#pragma once

#include <stdexcept>
#include <string>

namespace posctl {

/// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A sign-structure hypothesis (Metzler, nonnegative, dominated, ...) is violated.
class StructureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Singular systems, iteration caps and other floating-point failures.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace posctl
