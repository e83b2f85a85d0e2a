#pragma once

#include <stdexcept>
#include <string>

namespace qzeno {

// Invalid input data (worldline tables, parameters, grids).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Query outside the domain a quantity was built for.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Argument outside the mathematical domain of an operation (e.g. ln of s <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical invariant failed at run time: non-Hermitian kernel, positive
// dephasing exponent, degenerate Wightman denominator.
class ContractViolation : public std::runtime_error {
 public:
  ContractViolation(std::string invariant, const std::string& what)
      : std::runtime_error(what), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

}  // namespace qzeno
