#pragma once

#include <stdexcept>
#include <string>

namespace bubblelator {

// Invalid input: maps to CLI exit status 2.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Solver failure (nonconvergence, blow-up, tolerance miss): exit status 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bubblelator
