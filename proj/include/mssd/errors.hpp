#ifndef MSSD_ERRORS_HPP
#define MSSD_ERRORS_HPP

#include <stdexcept>

namespace mssd {

// Shape or dimension mismatch between operands.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated call contract (bad argument, tape misuse, missing state).
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problems ingesting external data.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mssd

#endif // MSSD_ERRORS_HPP
