#include "qsn/protocols.hpp"

#include <cmath>
#include <string>

#include "qsn/kernels.hpp"

namespace qsn {

StrategyCost local_cost(const ProblemInstance& inst) {
  const double t = inst.t();
  return StrategyCost::make(Strategy::Local, inst.weight_sum() / (t * t), inst.d());
}

MuVector mu_vector(const ProblemInstance& inst) {
  MuVector out;
  out.mu.resize(static_cast<std::size_t>(inst.n()));
  for (int l = 0; l < inst.n(); ++l) out.mu[l] = inst.A().row(l).cwiseAbs().maxCoeff();
  return out;
}

MuVector mu_vector(const ProblemInstance& inst, const BasisChange& basis) {
  if (basis.n() != inst.n()) {
    throw Error(ErrorCode::DimensionMismatch, "basis change is " + std::to_string(basis.n()) +
                                                  "x" + std::to_string(basis.n()) + " but n = " +
                                                  std::to_string(inst.n()));
  }
  if (basis.singular()) throw Error(ErrorCode::SingularC, "basis change is not invertible");

  const auto n = static_cast<std::size_t>(inst.n());
  const auto d = static_cast<std::size_t>(inst.d());
  std::vector<double> coeffs(n);
  MuVector out;
  out.mu.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t m = 0; m < n; ++m) coeffs[m] = basis.Cinv()(l, m);
    out.mu[l] = kernels::combination_abs_max(coeffs, inst.A().data(), d, d);
  }
  return out;
}

TimeAllocation optimal_times(std::span<const double> k, double t) {
  if (k.empty()) throw Error(ErrorCode::BadDimensions, "no functions to allocate time to");
  if (!(t > 0.0)) throw Error(ErrorCode::NonPositive, "total time is not positive");
  double root_sum = 0.0;
  for (double kl : k) {
    if (!(kl > 0.0) || !std::isfinite(kl)) {
      throw Error(ErrorCode::NonPositiveK, "time-allocation weights must be positive and finite");
    }
    root_sum += std::cbrt(kl);
  }
  TimeAllocation out;
  out.times.reserve(k.size());
  for (double kl : k) out.times.push_back(t * std::cbrt(kl) / root_sum);
  out.cost = root_sum * root_sum * root_sum / (t * t);
  return out;
}

namespace {

// Functions whose measured coefficient vector vanishes need no time; the
// rest share t by the closed form.
TimeAllocation allocate_skipping_zeros(const std::vector<double>& k, double t) {
  std::vector<double> positive;
  for (double kl : k) {
    if (kl > 0.0) positive.push_back(kl);
  }
  if (positive.size() == k.size()) return optimal_times(k, t);
  TimeAllocation partial = optimal_times(positive, t);
  TimeAllocation out;
  out.cost = partial.cost;
  out.times.reserve(k.size());
  std::size_t next = 0;
  for (double kl : k) out.times.push_back(kl > 0.0 ? partial.times[next++] : 0.0);
  return out;
}

}  // namespace

std::pair<StrategyCost, TimeAllocation> naive_cost(const ProblemInstance& inst) {
  const MuVector mu = mu_vector(inst);
  std::vector<double> k(mu.mu.size());
  for (std::size_t l = 0; l < k.size(); ++l) k[l] = inst.w()[static_cast<Eigen::Index>(l)] * mu.mu[l] * mu.mu[l];
  TimeAllocation alloc = optimal_times(k, inst.t());
  return {StrategyCost::make(Strategy::Naive, alloc.cost, inst.d()), std::move(alloc)};
}

SequentialEvaluation sequential_cost_at(const ProblemInstance& inst, const BasisChange& basis) {
  if (basis.n() != inst.n()) throw Error(ErrorCode::DimensionMismatch, "basis change has wrong size");
  if (basis.singular()) throw Error(ErrorCode::SingularC, "basis change is not invertible");
  const double err = basis.normalization_error(inst.w());
  if (err > kColumnNormalizationTolerance) {
    throw Error(ErrorCode::NotNormalized,
                "columns of C leave the weight ellipsoid by " + format_double(err));
  }

  SequentialEvaluation out;
  out.mu_prime = mu_vector(inst, basis);
  std::vector<double> k(out.mu_prime.mu.size());
  for (std::size_t l = 0; l < k.size(); ++l) k[l] = out.mu_prime.mu[l] * out.mu_prime.mu[l];
  out.times = allocate_skipping_zeros(k, inst.t());
  out.cost = out.times.cost;
  return out;
}

double sequential_cost_general(const ProblemInstance& inst, const BasisChange& basis) {
  const MuVector mu = mu_vector(inst, basis);
  const Eigen::MatrixXd& c = basis.C();
  double s = 0.0;
  for (int l = 0; l < inst.n(); ++l) {
    double column = 0.0;
    for (int m = 0; m < inst.n(); ++m) column += inst.w()[m] * c(m, l) * c(m, l);
    s += std::cbrt(column * mu.mu[l] * mu.mu[l]);
  }
  const double t = inst.t();
  return s * s * s / (t * t);
}

BasisChange normalized_identity(const Vector& w) {
  return BasisChange::from_matrix(w.cwiseSqrt().cwiseInverse().asDiagonal().toDenseMatrix());
}

NaiveBounds naive_equal_weight_bounds(const ProblemInstance& inst) {
  const Vector& w = inst.w();
  for (Eigen::Index l = 1; l < w.size(); ++l) {
    if (std::abs(w[l] - w[0]) > 1e-12 * std::abs(w[0])) {
      throw Error(ErrorCode::UnequalWeights, "bounds hold for equal weights only");
    }
  }
  const double n = inst.n();
  const double t2 = inst.t() * inst.t();
  const double upper = n * n * inst.weight_sum() / t2;
  return {upper / inst.d(), upper};
}

}  // namespace qsn
