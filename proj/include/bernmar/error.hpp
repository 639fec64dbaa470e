#pragma once

#include <stdexcept>

namespace bernmar {

//! Malformed or schema-violating input. The CLI maps this to exit code 1.
class InputError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! An estimator cannot be computed from otherwise valid input (e.g. a
//! covariate cell without any observed response). CLI exit code 2.
class EstimationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace bernmar
