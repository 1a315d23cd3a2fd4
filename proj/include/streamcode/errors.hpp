#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace streamcode {

/// Invalid construction parameters (u, v, delta, T, field size, ...).
class ParameterError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an API precondition (history gaps, out-of-order steps).
class ContractViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

/// Closed form requested outside the parameter range where it holds.
class RegimeError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Random construction kept failing its rank verification.
class ConstructionError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration would be too large to run.
class EnumerationTooLarge : public std::runtime_error
{
public:
  EnumerationTooLarge(const std::string& what, double estimated_count)
    : std::runtime_error(what), estimated_count_(estimated_count)
  {}

  double estimated_count() const noexcept { return estimated_count_; }

private:
  double estimated_count_;
};

/// Bad command line or descriptor string.
class UsageError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

} // namespace streamcode
