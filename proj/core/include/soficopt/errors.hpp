#pragma once

#include <stdexcept>
#include <string>

namespace soficopt {

/// Malformed or invalid input text (exit code 2 at the CLI).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometry degenerate for the requested operation, e.g. a rotation set
/// that is not full-dimensional (exit code 3).
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constraints admit no feasible point (exit code 4).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Target rotation vector lies on the boundary of (or outside) the
/// rotation set, where periodic synthesis is impossible (exit code 5).
class BoundaryRotationVector : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The synthesis retry schedule was exhausted (exit code 6).
class RetryExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A postcondition the construction guarantees failed to hold; indicates
/// a bug, never bad user input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace soficopt
