#pragma once

#include <stdexcept>
#include <string>

namespace ecbc {

//! Raised when caller-supplied input violates a documented precondition.
class ValidationError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! Raised when an internal invariant that should hold by construction fails.
class InternalError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

} // namespace ecbc
