#pragma once

#include <stdexcept>
#include <string>

namespace gadsel {

// Error taxonomy. The CLI maps ConfigError to exit code 2 and
// SearchError (every trial failed) to exit code 3.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SearchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace gadsel
