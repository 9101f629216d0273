#pragma once

#include <stdexcept>
#include <string>

namespace goba {

// Caller passed an argument a library operation cannot accept
// (out-of-range fraction, k > n, unknown object id, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input data is malformed or internally inconsistent (bad manifest line,
// unreadable blob, mismatched key sets, pool underflow, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace goba
