#pragma once

// Optimized sequential strategy: search over basis changes C whose columns lie
// on the weight ellipsoid sum_m w_m C_ml^2 = 1, plus the analytic pieces for
// nearly overlapping functions (the saturating C and the mean direction a-bar).

#include <cstdint>
#include <string>
#include <vector>

#include "qsn/basis.hpp"
#include "qsn/core.hpp"
#include "qsn/protocols.hpp"

namespace qsn {

/// n columns x (n-1) hyperspherical angles each, column-major: angles
/// [l(n-1), (l+1)(n-1)) belong to column l. For n = 2 column l is
/// (cos a_l, sin a_l) / sqrt(w).
struct AngleChart {
  std::vector<double> angles;
  std::vector<double> weights;

  int n() const noexcept { return static_cast<int>(weights.size()); }
};

inline constexpr double kMaxConditionNumber = 1e8;

/// Column l = D^{-1/2} s(theta_l) with D = diag(w) and s the unit-sphere
/// embedding. The result is never rejected here; check singular() or
/// condition_number() > kMaxConditionNumber.
BasisChange chart_to_C(const AngleChart& chart);

/// Angles of C's columns after projecting each onto the weight ellipsoid.
/// Column signs are fixed so that the last angle of every column lies in
/// [0, pi); the first n-2 angles lie in [0, pi].
AngleChart C_to_chart(const Eigen::MatrixXd& C, const std::vector<double>& weights);

/// C_to_chart(chart_to_C(chart)).C(): the gauge-fixed representative.
AngleChart canonical_chart(const AngleChart& chart);

struct SequentialPlan {
  BasisChange basis;
  TimeAllocation times;
  MuVector mu_prime;
  double cost = 0.0;  // already multiplied by 1/t^2
  int restarts_used = 0;
  std::string winning_start;

  StrategyCost as_cost(int d) const { return StrategyCost::make(Strategy::OptSequential, cost, d); }
};

struct OptimizerOptions {
  int restarts = 64;
  std::uint64_t seed = 1;
  int max_iterations = 2000;
  double tolerance = 1e-10;
};

/// Objective minimized over charts: t^-2 [sum_l mu'_l^{2/3}]^3, multiplied by
/// (1 + max(0, cond(C)/1e8 - 1)); +infinity for a singular C.
double sequential_chart_objective(const ProblemInstance& inst, const AngleChart& chart);

SequentialPlan opt_sequential_cost(const ProblemInstance& inst, const OptimizerOptions& opts = {});

/// Basis change whose column p_star is 1/sqrt(N) * (1,...,1) and whose other
/// columns span the orthogonal complement of (1,...,1), each scaled onto the
/// weight ellipsoid. Then C^{-1} (1,...,1) = sqrt(N) e_{p_star}. p_star is
/// zero-based.
BasisChange saturating_C(const Vector& w, int p_star);

struct OverlapAnalysis {
  Vector a_bar;                // unit vector
  std::vector<double> deltas;  // angle between each alpha_l and a_bar
  double delta = 0.0;          // max of deltas
};

/// a_bar minimizes the mean angle to the rows, found by projected gradient
/// descent on the sphere from the normalized row mean.
OverlapAnalysis overlap_analysis(const ProblemInstance& inst);

/// N max_i a_bar_i^2 / t^2. Throws DeltaTooLarge unless delta < 0.2/sqrt(d).
double nearly_overlapping_prediction(const ProblemInstance& inst);

}  // namespace qsn
