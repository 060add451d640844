#pragma once

// Cramér–Rao lower bound for signed sensor-symmetric states: the geometry
// parameter G(omega), the optimal inter-sensor correlation J, the bound at a
// fixed sign vector, and its minimization over sign vectors.

#include <cstdint>
#include <span>
#include <vector>

#include "qsn/core.hpp"

namespace qsn {

/// d entries, each exactly +1 or -1. omega and -omega give the same bound;
/// the canonical representative has a leading +1.
class SignVector {
 public:
  static SignVector ones(int d);
  /// Throws BadParameters unless every entry is exactly +1 or -1.
  static SignVector from(std::vector<double> entries);

  int size() const noexcept { return static_cast<int>(v_.size()); }
  std::span<const double> values() const noexcept { return v_; }
  double operator[](int i) const noexcept { return v_[static_cast<std::size_t>(i)]; }

  SignVector negated() const;
  SignVector flipped(int i) const;
  SignVector canonical() const;

  friend bool operator==(const SignVector&, const SignVector&) = default;

 private:
  explicit SignVector(std::vector<double> v) : v_(std::move(v)) {}
  std::vector<double> v_;
};

struct SsBoundResult {
  SignVector omega;
  double G;      // in [-1, d-1]
  double j_opt;  // inside (1/(1-d), 1)
  double value;  // bound, already multiplied by 1/t^2
  bool searched_exhaustively;

  StrategyCost as_cost(int d) const {
    return StrategyCost::make(Strategy::SignedSensorSymmetric, value, d);
  }
};

/// G = (1/N) sum_l w_l ((alpha_l . omega)^2 - 1)
double geometry_parameter(const ProblemInstance& inst, const SignVector& omega);

/// Minimizer over J of ss_objective(d, G, J), clamped 1e-12 inside the open
/// interval (1/(1-d), 1). Throws GOutOfRange for G outside [-1, d-1] by more
/// than 1e-9, BadParameters for d < 2.
double j_opt(int d, double G);

/// (1 + [d-2-G] J) / ((1-J)(1+(d-1)J)), the bound in units of N/t^2.
double ss_objective(int d, double G, double J);

/// min over J of ss_objective, evaluated at the exact minimizer; handles the
/// aligned (G = d-1) and anti-aligned (G = -1) endpoints.
double ss_min_over_j(int d, double G);

SsBoundResult ss_cost_at(const ProblemInstance& inst, const SignVector& omega);

struct SearchBudget {
  int exhaustive_limit = 20;  // exhaustive over 2^{d-1} sign vectors when d <= this
  int restarts = 32;          // random restarts of the greedy descent above it
  std::uint64_t seed = 0x5EEDULL;
};

SsBoundResult ss_bound(const ProblemInstance& inst, const SearchBudget& budget = {});

/// Angles between each alpha_l and omega, in [0, pi].
std::vector<double> omega_angles(const ProblemInstance& inst, const SignVector& omega);

/// (N/t^2)(sin^2 phi' + 1/d): large-d value when every function sits at angle
/// phi' from omega. Diagnostic only; the caller checks the angles.
double ss_geometric_limit_approx(const ProblemInstance& inst, const SignVector& omega,
                                 double phi_prime);

}  // namespace qsn
