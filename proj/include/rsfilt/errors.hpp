#pragma once

#include <stdexcept>
#include <string>

namespace rsfilt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotPositiveSemidefinite : public Error {
 public:
  NotPositiveSemidefinite(const std::string& what, double worst_eigenvalue)
      : Error(what), worst_eigenvalue_(worst_eigenvalue) {}
  double worst_eigenvalue() const noexcept { return worst_eigenvalue_; }

 private:
  double worst_eigenvalue_;
};

class NegativeVariance : public Error {
 public:
  using Error::Error;
};

class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

/// Raised when the Riccati-Volterra solution violates the feasibility
/// condition. `step` is 1-indexed; `clause` names the violated inequality.
class InfeasibleCondition : public Error {
 public:
  InfeasibleCondition(const std::string& what, int step, std::string clause)
      : Error(what), step_(step), clause_(std::move(clause)) {}
  int step() const noexcept { return step_; }
  const std::string& clause() const noexcept { return clause_; }

 private:
  int step_;
  std::string clause_;
};

class SingularInnovationMatrix : public Error {
 public:
  SingularInnovationMatrix(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

class InconsistentRecursion : public Error {
 public:
  using Error::Error;
};

class SingularConditioning : public Error {
 public:
  using Error::Error;
};

class TransformDiverges : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class OverflowDominated : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rsfilt
