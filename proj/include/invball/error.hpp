#pragma once

#include <stdexcept>
#include <string>

namespace invball {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad problem configuration: non-positive speeds, broken cone or terrain
/// declarations, schema violations in scenario files.
class InvalidScenario : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// No elevation angle reaches the point at the configured muzzle speed.
class Unreachable : public Error {
 public:
  using Error::Error;
};

/// The point violates the reachable-set inequalities (e.g. x < kappa).
class OutsideReachableSet : public Error {
 public:
  using Error::Error;
};

/// The sphere (or circle) searched in a projection step has no point
/// inside the reachable set.
class InfeasibleSphere : public Error {
 public:
  using Error::Error;
};

}  // namespace invball
