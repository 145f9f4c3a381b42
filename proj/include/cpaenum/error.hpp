#pragma once

#include <stdexcept>
#include <string>

namespace cpaenum {

// Malformed documents, bad dimensions, violated preconditions.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The LP kernel could not reach a verdict (iteration guard, loss of precision).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cpaenum
