#pragma once

#include <stdexcept>
#include <string>

namespace auvplan {

// Malformed input documents (field files, plan files, config documents).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a domain invariant: land goals, bad cost
// ordering, non-finite velocities on free cells, hash mismatches.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfBounds : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Up at the surface layer, Down at the bottom layer, or a glide into land.
class ActionUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace auvplan
