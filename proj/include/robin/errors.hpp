#pragma once

#include <stdexcept>
#include <string>

namespace robin
{

// Bad input: violated precondition, malformed file, invalid parameter.
class InvalidInput : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// A computation that was set up correctly but could not finish (unconverged
// solve, inverted element, failed bracket).
class NumericalFailure : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace robin
