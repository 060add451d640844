#include "qsn/basis.hpp"

#include <limits>

namespace qsn {

BasisChange BasisChange::try_from_matrix(Eigen::MatrixXd c) noexcept {
  BasisChange b;
  b.c_ = std::move(c);
  if (b.c_.rows() != b.c_.cols() || b.c_.rows() == 0 || !b.c_.allFinite()) {
    b.cond_ = std::numeric_limits<double>::infinity();
    return b;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.c_);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (!(smin > 0.0)) {
    b.cond_ = std::numeric_limits<double>::infinity();
    return b;
  }
  b.cond_ = sv[0] / smin;
  b.cinv_ = b.c_.fullPivLu().inverse();
  if (!b.cinv_.allFinite()) {
    b.cinv_.resize(0, 0);
    b.cond_ = std::numeric_limits<double>::infinity();
  }
  return b;
}

BasisChange BasisChange::from_matrix(Eigen::MatrixXd c) {
  if (c.rows() != c.cols()) throw Error(ErrorCode::DimensionMismatch, "basis change must be square");
  BasisChange b = try_from_matrix(std::move(c));
  if (b.singular()) throw Error(ErrorCode::SingularC, "basis change is not invertible");
  return b;
}

double BasisChange::normalization_error(const Vector& w) const {
  double worst = 0.0;
  for (Eigen::Index l = 0; l < c_.cols(); ++l) {
    double s = 0.0;
    for (Eigen::Index m = 0; m < c_.rows(); ++m) s += w[m] * c_(m, l) * c_(m, l);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace qsn
