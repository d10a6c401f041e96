#pragma once

#include <stdexcept>
#include <string>

namespace jumpgeo {

/// Precondition or membership violation.
class DomainError : public std::domain_error {
  public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Exponential-type connection rule or log map asked for a point in the cut locus.
class CutLocusError : public DomainError {
  public:
    explicit CutLocusError(const std::string& what) : DomainError(what) {}
};

/// Iterative numerical routine failed to converge (geodesic integration, shooting).
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature order-doubling did not settle.
class AccuracyError : public NumericError {
  public:
    explicit AccuracyError(const std::string& what) : NumericError(what) {}
};

/// Requested simulation would exceed the event budget.
class ResourceError : public std::runtime_error {
  public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jumpgeo
