#pragma once

#include <stdexcept>
#include <string>

namespace tasep {

// Bad arguments: invalid sector counts, unsupported sizes, singular root sets.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iterative solver failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tasep
