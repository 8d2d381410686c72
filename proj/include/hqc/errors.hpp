#pragma once

#include <stdexcept>
#include <string>

namespace hqc {

// Gadget region overlaps another region or does not fit the lattice.
class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested basis exceeds the configured dimension cap.
class TooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An integrator or solver could not reach the requested accuracy.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Circuit parameters lead to a negative dressed inductive energy.
class UnphysicalDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root search found no sign change.
class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hqc
