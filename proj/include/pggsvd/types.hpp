#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pggsvd {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Raised when a matrix has a singular value too close to the rank cutoff
/// to classify. Carries the offending value so callers can adjust the tolerance.
class RankAmbiguityError : public std::runtime_error {
 public:
  RankAmbiguityError(const std::string& what, double value, double cutoff)
      : std::runtime_error(what), value_(value), cutoff_(cutoff) {}
  double value() const { return value_; }
  double cutoff() const { return cutoff_; }

 private:
  double value_;
  double cutoff_;
};

/// Raised when the number of enumerated symbol vectors M^N exceeds the
/// supported bound.
class EnumerationOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Raised when a requested pairing or construction is impossible for the
/// channel at hand (e.g. too few Bob-only subchannels).
class InfeasibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace pggsvd
