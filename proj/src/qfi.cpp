#include "qsn/qfi.hpp"

#include <string>

namespace qsn {

QfiModel QfiModel::make(const SignVector& omega, double t, double J) {
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositive, "total time is not positive");
  QfiModel m{omega.size(), t * t / 4.0, J, omega};
  if (!m.invertible()) {
    throw Error(ErrorCode::BadParameters, "J = " + format_double(J) + " outside (1/(1-d), 1) for d = " +
                                              std::to_string(m.d));
  }
  return m;
}

bool QfiModel::invertible() const noexcept {
  if (!(v > 0.0)) return false;
  if (d == 1) return true;
  return J < 1.0 && 1.0 + (d - 1.0) * J > 0.0;
}

Eigen::MatrixXd qfi_matrix(const QfiModel& model) {
  const Eigen::Map<const Eigen::VectorXd> w(model.omega.values().data(), model.d);
  Eigen::MatrixXd f = model.J * (w * w.transpose());
  f.diagonal().array() += 1.0 - model.J;
  return 4.0 * model.v * f;
}

Eigen::MatrixXd qfi_inverse_closed(const QfiModel& model) {
  if (!model.invertible()) throw Error(ErrorCode::BadParameters, "Fisher matrix is singular");
  const double aligned = 1.0 + (model.d - 1.0) * model.J;
  const Eigen::Map<const Eigen::VectorXd> w(model.omega.values().data(), model.d);
  Eigen::MatrixXd inv = -model.J * (w * w.transpose());
  inv.diagonal().array() += aligned;
  return inv / (4.0 * model.v * (1.0 - model.J) * aligned);
}

QfiSpectrum qfi_eigenvalues(const QfiModel& model) {
  return {4.0 * model.v * (1.0 + (model.d - 1.0) * model.J), 4.0 * model.v * (1.0 - model.J)};
}

double crb_cost(const ProblemInstance& inst, const QfiModel& model) {
  if (model.d != inst.d()) {
    throw Error(ErrorCode::DimensionMismatch, "model has d = " + std::to_string(model.d) +
                                                  ", instance has d = " + std::to_string(inst.d()));
  }
  const Eigen::MatrixXd inv = qfi_inverse_closed(model);
  const Eigen::MatrixXd a = inst.A();
  const Eigen::MatrixXd projected = a * inv * a.transpose();
  return inst.w().dot(projected.diagonal());
}

}  // namespace qsn
