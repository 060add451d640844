#pragma once

// Fisher-information view of the signed sensor-symmetric bound:
// F = 4v[(1-J) I + J omega omega^T] with v = t^2/4, its closed-form inverse,
// and the Cramér–Rao figure of merit sum_l w_l (A F^{-1} A^T)_ll.

#include <Eigen/Dense>

#include "qsn/core.hpp"
#include "qsn/ssbound.hpp"

namespace qsn {

struct QfiModel {
  int d;
  double v;  // per-sensor generator variance
  double J;  // inter-sensor correlation
  SignVector omega;

  /// v = t^2 / 4. Throws BadParameters unless J lies strictly inside
  /// (1/(1-d), 1).
  static QfiModel make(const SignVector& omega, double t, double J);

  /// Whether F is positive definite for this (d, J).
  bool invertible() const noexcept;
};

/// Valid for any J, including values where F is singular or indefinite.
Eigen::MatrixXd qfi_matrix(const QfiModel& model);

/// ([1+(d-1)J] I - J Omega) / (4v(1-J)[1+(d-1)J]). Throws BadParameters when
/// the model is not invertible.
Eigen::MatrixXd qfi_inverse_closed(const QfiModel& model);

/// Eigenvalues 4v[1+(d-1)J] (once) and 4v(1-J) (d-1 times).
struct QfiSpectrum {
  double aligned;
  double transverse;
};
QfiSpectrum qfi_eigenvalues(const QfiModel& model);

/// sum_l w_l (A F^{-1} A^T)_ll with the closed-form inverse.
double crb_cost(const ProblemInstance& inst, const QfiModel& model);

}  // namespace qsn
