#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace axiograd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class UnsupportedNode : public Error {
 public:
  using Error::Error;
};

class InvalidAlpha : public Error {
 public:
  using Error::Error;
};

class OrderTooLarge : public Error {
 public:
  using Error::Error;
};

/// A ReLU (or max) unit identified by its layer and position in that layer.
struct KinkUnit {
  std::size_t layer = 0;
  std::size_t unit = 0;

  friend bool operator==(const KinkUnit&, const KinkUnit&) = default;
};

class NondifferentiableAt : public Error {
 public:
  NondifferentiableAt(std::vector<double> x, std::vector<KinkUnit> units);

  const std::vector<double>& point() const noexcept { return point_; }
  const std::vector<KinkUnit>& kink_units() const noexcept { return units_; }

 private:
  std::vector<double> point_;
  std::vector<KinkUnit> units_;
};

class NondifferentiableNearby : public Error {
 public:
  using Error::Error;
};

// Path errors.
class Unbound : public Error {
 public:
  using Error::Error;
};

class EnsembleNotPointwise : public Error {
 public:
  using Error::Error;
};

class AtBreakpoint : public Error {
 public:
  using Error::Error;
};

class WrongDimension : public Error {
 public:
  using Error::Error;
};

class InvalidPath : public Error {
 public:
  using Error::Error;
};

// Attribution errors.
class NondifferentiablePath : public Error {
 public:
  NondifferentiablePath(const std::string& what, double flagged_fraction)
      : Error(what), flagged_fraction_(flagged_fraction) {}

  double flagged_fraction() const noexcept { return flagged_fraction_; }

 private:
  double flagged_fraction_;
};

class QuadratureDiverged : public Error {
 public:
  QuadratureDiverged(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}

  double error_estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// Raised by attribution callbacks outside their domain of definition.
class MethodUndefined : public Error {
 public:
  using Error::Error;
};

class TooManyInputs : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace axiograd
