#pragma once

#include <stdexcept>
#include <string>

namespace renyi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  InvalidParameter(std::string parameter, const std::string& message)
      : Error("invalid parameter '" + parameter + "': " + message), parameter_(std::move(parameter)) {}
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class EmptyDomain : public Error {
 public:
  using Error::Error;
};

/// A non-integrable singularity; `location` is the offending abscissa.
class DivergentIntegral : public Error {
 public:
  DivergentIntegral(const std::string& message, double location)
      : Error(message), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

class NoDefinedPoint : public Error {
 public:
  using Error::Error;
};

class ConstraintUnattainable : public Error {
 public:
  ConstraintUnattainable(const std::string& message, double closest_mean)
      : Error(message), closest_mean_(closest_mean) {}
  double closest_mean() const noexcept { return closest_mean_; }

 private:
  double closest_mean_;
};

class IndexMismatch : public Error {
 public:
  using Error::Error;
};

class InfeasibleConstraint : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& message, double residual)
      : Error(message), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace renyi
