#pragma once

#include <stdexcept>
#include <string>

namespace engel {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Operation called on a covector whose stratum it does not handle.
class UnsupportedStratum : public DomainError
{
public:
  using DomainError::DomainError;
};

/// Terminal point lies outside the region an inversion routine expects.
class WrongRegion : public DomainError
{
public:
  using DomainError::DomainError;
};

/// Terminal point on the Maxwell set where no synthesis is implemented.
class Unsupported : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Newton inversion exhausted every start without meeting the tolerance.
class NonConvergence : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace engel
