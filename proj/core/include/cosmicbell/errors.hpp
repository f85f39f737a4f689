#pragma once

#include <stdexcept>
#include <string>

namespace cosmicbell {

// Invalid argument outside an operation's mathematical domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Bad or unusable input data (files, tables, empty cells, no drift lock).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Broken internal invariant; indicates a bug rather than bad input.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// Inconsistent or missing command-line/config choices.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace cosmicbell
