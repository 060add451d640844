#include "qsn/ssbound.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsn/kernels.hpp"
#include "qsn/rng.hpp"

namespace qsn {

SignVector SignVector::ones(int d) { return SignVector(std::vector<double>(static_cast<std::size_t>(d), 1.0)); }

SignVector SignVector::from(std::vector<double> entries) {
  if (entries.empty()) throw Error(ErrorCode::BadParameters, "sign vector is empty");
  for (double e : entries) {
    if (e != 1.0 && e != -1.0) throw Error(ErrorCode::BadParameters, "sign vector entries must be +1 or -1");
  }
  return SignVector(std::move(entries));
}

SignVector SignVector::negated() const {
  std::vector<double> v = v_;
  for (double& e : v) e = -e;
  return SignVector(std::move(v));
}

SignVector SignVector::flipped(int i) const {
  std::vector<double> v = v_;
  v[static_cast<std::size_t>(i)] = -v[static_cast<std::size_t>(i)];
  return SignVector(std::move(v));
}

SignVector SignVector::canonical() const { return v_.front() > 0 ? *this : negated(); }

namespace {

void require_matching(const ProblemInstance& inst, const SignVector& omega) {
  if (omega.size() != inst.d()) {
    throw Error(ErrorCode::DimensionMismatch, "sign vector has " + std::to_string(omega.size()) +
                                                  " entries, instance has d = " + std::to_string(inst.d()));
  }
}

double geometry_from_projections(const ProblemInstance& inst, std::span<const double> proj) {
  double s = 0.0;
  for (int l = 0; l < inst.n(); ++l) s += inst.w()[l] * (proj[l] * proj[l] - 1.0);
  return s / inst.weight_sum();
}

double clamp_g(int d, double G) {
  const double hi = d - 1.0;
  if (!(G >= -1.0 - 1e-9 && G <= hi + 1e-9)) {
    throw Error(ErrorCode::GOutOfRange, "G = " + format_double(G) + " outside [-1, " +
                                            format_double(hi) + "]");
  }
  return std::clamp(G, -1.0, hi);
}

// Exact minimizer. The textbook form [1 - sqrt(q)] / (G + 2 - d) has a
// removable singularity at G = d - 2; multiplying through by 1 + sqrt(q)
// gives G / ((d-1)(1 + sqrt(q))) with no singularity anywhere on [-1, d-1].
double j_opt_unclamped(int d, double G) {
  const double dm1 = d - 1.0;
  const double q = std::max(0.0, (G + 1.0) * (dm1 - G) / dm1);
  return G / (dm1 * (1.0 + std::sqrt(q)));
}

}  // namespace

double geometry_parameter(const ProblemInstance& inst, const SignVector& omega) {
  require_matching(inst, omega);
  std::vector<double> proj(static_cast<std::size_t>(inst.n()));
  for (int l = 0; l < inst.n(); ++l) proj[l] = kernels::dot(inst.row(l), omega.values());
  return geometry_from_projections(inst, proj);
}

double j_opt(int d, double G) {
  if (d < 2) throw Error(ErrorCode::BadParameters, "correlation needs d >= 2");
  G = clamp_g(d, G);
  const double lo = 1.0 / (1.0 - d) + 1e-12;
  const double hi = 1.0 - 1e-12;
  return std::clamp(j_opt_unclamped(d, G), lo, hi);
}

// Written so that no term cancels: for J >= 0 both summands of the first form
// are non-negative, for J < 0 both of the second.
double ss_objective(int d, double G, double J) {
  const double dm1 = d - 1.0;
  const double one_minus = 1.0 - J;
  const double one_plus = 1.0 + dm1 * J;
  if (J >= 0.0) {
    const double excess = dm1 - G;
    return 1.0 / one_plus + (excess == 0.0 ? 0.0 : excess * J / (one_minus * one_plus));
  }
  const double deficit = G + 1.0;
  return 1.0 / one_minus - (deficit == 0.0 ? 0.0 : deficit * J / (one_minus * one_plus));
}

double ss_min_over_j(int d, double G) {
  if (d < 2) return 1.0;  // a single sensor has no correlations to exploit
  G = clamp_g(d, G);
  return ss_objective(d, G, j_opt_unclamped(d, G));
}

SsBoundResult ss_cost_at(const ProblemInstance& inst, const SignVector& omega) {
  const int d = inst.d();
  const double G = geometry_parameter(inst, omega);
  const double t = inst.t();
  const double scale = inst.weight_sum() / (t * t);
  if (d < 2) return {omega, G, 0.0, scale, true};
  return {omega, std::clamp(G, -1.0, d - 1.0), j_opt(d, G), scale * ss_min_over_j(d, G), true};
}

namespace {

struct Extremes {
  double g_max = -1e300;
  double g_min = 1e300;
  std::vector<double> omega_max;
  std::vector<double> omega_min;
};

// Gray-code walk over the 2^{d-1} sign vectors with leading +1. Each step
// flips one sign, so the projections alpha_l . omega update in O(n).
Extremes exhaustive_extremes(const ProblemInstance& inst) {
  const int n = inst.n();
  const int d = inst.d();
  std::vector<double> omega(static_cast<std::size_t>(d), 1.0);
  std::vector<double> proj(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) proj[l] = inst.A().row(l).sum();

  Extremes ex;
  auto visit = [&] {
    const double G = geometry_from_projections(inst, proj);
    if (G > ex.g_max) {
      ex.g_max = G;
      ex.omega_max = omega;
    }
    if (G < ex.g_min) {
      ex.g_min = G;
      ex.omega_min = omega;
    }
  };
  visit();
  const std::uint64_t count = std::uint64_t{1} << (d - 1);
  for (std::uint64_t k = 1; k < count; ++k) {
    const int bit = __builtin_ctzll(k);
    const int i = bit + 1;  // sign 0 stays +1
    const double before = omega[static_cast<std::size_t>(i)];
    omega[static_cast<std::size_t>(i)] = -before;
    for (int l = 0; l < n; ++l) proj[l] -= 2.0 * before * inst.A()(l, i);
    visit();
  }
  return ex;
}

double value_for(const ProblemInstance& inst, std::span<const double> proj) {
  const int d = inst.d();
  const double G = std::clamp(geometry_from_projections(inst, proj), -1.0, d - 1.0);
  return ss_min_over_j(d, G);
}

// Single-flip steepest descent on the bound. Returns the final value in
// units of N/t^2 and leaves omega at the local minimum.
double greedy_descent(const ProblemInstance& inst, std::vector<double>& omega) {
  const int n = inst.n();
  const int d = inst.d();
  std::vector<double> proj(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) proj[l] = kernels::dot(inst.row(l), omega);
  double current = value_for(inst, proj);
  std::vector<double> trial(static_cast<std::size_t>(n));
  for (;;) {
    int best_i = -1;
    double best = current;
    for (int i = 0; i < d; ++i) {
      for (int l = 0; l < n; ++l) trial[l] = proj[l] - 2.0 * omega[i] * inst.A()(l, i);
      const double v = value_for(inst, trial);
      if (v < best * (1.0 - 1e-15)) {
        best = v;
        best_i = i;
      }
    }
    if (best_i < 0) return current;
    for (int l = 0; l < n; ++l) proj[l] -= 2.0 * omega[best_i] * inst.A()(l, best_i);
    omega[best_i] = -omega[best_i];
    current = best;
  }
}

}  // namespace

SsBoundResult ss_bound(const ProblemInstance& inst, const SearchBudget& budget) {
  const int d = inst.d();
  if (d < 2) return ss_cost_at(inst, SignVector::ones(d));

  if (d <= budget.exhaustive_limit && d <= 62) {
    // The bound is a minimum over J of functions affine in G, hence concave
    // in G; over any finite set of G values it is smallest at an extreme.
    const Extremes ex = exhaustive_extremes(inst);
    SsBoundResult hi = ss_cost_at(inst, SignVector::from(ex.omega_max));
    SsBoundResult lo = ss_cost_at(inst, SignVector::from(ex.omega_min));
    SsBoundResult& best = lo.value < hi.value ? lo : hi;
    best.searched_exhaustively = true;
    return best;
  }

  std::vector<double> start(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int l = 0; l < inst.n(); ++l) s += inst.w()[l] * inst.A()(l, i);
    start[i] = s < 0.0 ? -1.0 : 1.0;
  }
  std::vector<double> best_omega = start;
  double best_value = greedy_descent(inst, best_omega);

  CounterRng rng(budget.seed);
  for (int r = 0; r < budget.restarts; ++r) {
    std::vector<double> omega(static_cast<std::size_t>(d));
    for (double& e : omega) e = (rng() >> 63) ? -1.0 : 1.0;
    const double v = greedy_descent(inst, omega);
    if (v < best_value) {
      best_value = v;
      best_omega = omega;
    }
  }
  SsBoundResult out = ss_cost_at(inst, SignVector::from(best_omega).canonical());
  out.searched_exhaustively = false;
  return out;
}

std::vector<double> omega_angles(const ProblemInstance& inst, const SignVector& omega) {
  require_matching(inst, omega);
  std::vector<double> out(static_cast<std::size_t>(inst.n()));
  const double root_d = std::sqrt(static_cast<double>(inst.d()));
  for (int l = 0; l < inst.n(); ++l) {
    const double c = std::clamp(kernels::dot(inst.row(l), omega.values()) / root_d, -1.0, 1.0);
    out[l] = std::acos(c);
  }
  return out;
}

double ss_geometric_limit_approx(const ProblemInstance& inst, const SignVector& omega,
                                 double phi_prime) {
  require_matching(inst, omega);
  const double t = inst.t();
  const double s = std::sin(phi_prime);
  return inst.weight_sum() / (t * t) * (s * s + 1.0 / inst.d());
}

}  // namespace qsn
