#pragma once

#include <stdexcept>
#include <string>

namespace hessbif {

/// Malformed problem data, schema violations, violated preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The (f0, finf) pair falls outside the existence table (finite, equal limits).
class OutOfTable : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Ratio sequence f(s)/s does not settle at one of the ends.
class Unclassifiable : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Integrator breakdown, NaN, unbracketed roots, Newton divergence, tracing gaps.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hessbif
