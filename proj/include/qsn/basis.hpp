#pragma once

#include <Eigen/Dense>

#include "qsn/core.hpp"

namespace qsn {

/// Invertible n x n change of measured functions, A = C A'. Column l of C
/// gives the weights with which measured function l enters each original one.
class BasisChange {
 public:
  /// Inverts C and records its 2-norm condition number. Throws SingularC
  /// when C is not invertible.
  static BasisChange from_matrix(Eigen::MatrixXd c);

  /// Like from_matrix but never throws: a singular C yields an infinite
  /// condition number and an empty inverse.
  static BasisChange try_from_matrix(Eigen::MatrixXd c) noexcept;

  const Eigen::MatrixXd& C() const noexcept { return c_; }
  const Eigen::MatrixXd& Cinv() const noexcept { return cinv_; }
  double condition_number() const noexcept { return cond_; }
  bool singular() const noexcept { return cinv_.size() == 0; }
  int n() const noexcept { return static_cast<int>(c_.rows()); }

  /// max_l |sum_m w_m C_ml^2 - 1|
  double normalization_error(const Vector& w) const;

 private:
  BasisChange() = default;

  Eigen::MatrixXd c_;
  Eigen::MatrixXd cinv_;
  double cond_ = 0.0;
};

}  // namespace qsn
