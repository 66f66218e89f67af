#pragma once

#include <stdexcept>
#include <string>

namespace pframe {

// Malformed input: wrong shapes, non-finite entries, out-of-range parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Geometrically degenerate configuration (dependent anchors, empty complement,
// zero seminorm where a nonzero one is required, non-frame where a frame is needed).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A functional that does not annihilate the anchor span has infinite norm
// against the anchored seminorm.
class UnboundedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pframe
