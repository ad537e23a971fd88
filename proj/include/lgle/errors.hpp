#pragma once

#include <stdexcept>
#include <string>

namespace lgle {

// Domain violations use std::domain_error directly; the types below cover
// the failure modes that are specific to this library.

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class WindowError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace lgle
