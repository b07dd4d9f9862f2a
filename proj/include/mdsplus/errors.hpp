#pragma once

#include <stdexcept>
#include <string>

namespace mdsplus {

/// Input violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument lies outside the mathematical domain of a closed-form map.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed external input (CSV text, distance matrices that are not distances).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mdsplus
