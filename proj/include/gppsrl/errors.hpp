#pragma once

#include <stdexcept>

namespace gppsrl {

/// A computation left its numerically valid range (e.g. a clearly negative variance).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gppsrl
