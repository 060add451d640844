#pragma once

// Closed-form strategy costs: local, naive sequential, and the sequential
// cost at a fixed basis change together with its optimal time split.

#include <span>
#include <utility>
#include <vector>

#include "qsn/basis.hpp"
#include "qsn/core.hpp"

namespace qsn {

struct TimeAllocation {
  std::vector<double> times;  // sums to t
  double cost = 0.0;          // sum_l k_l / t_l^2 at these times
};

/// Per-function infinity norms of the measured coefficient vectors.
struct MuVector {
  std::vector<double> mu;
};

inline constexpr double kColumnNormalizationTolerance = 1e-8;

StrategyCost local_cost(const ProblemInstance& inst);

/// mu_l = max_j |(C^{-1} A)_{lj}|
MuVector mu_vector(const ProblemInstance& inst, const BasisChange& basis);
MuVector mu_vector(const ProblemInstance& inst);  // C = identity

/// Minimizes sum_l k_l / t_l^2 subject to sum_l t_l = t:
/// t_l = t k_l^{1/3} / sum_p k_p^{1/3}, cost = (sum_l k_l^{1/3})^3 / t^2.
TimeAllocation optimal_times(std::span<const double> k, double t);

std::pair<StrategyCost, TimeAllocation> naive_cost(const ProblemInstance& inst);

struct SequentialEvaluation {
  double cost = 0.0;
  TimeAllocation times;
  MuVector mu_prime;
};

/// Sequential cost at a fixed C whose columns satisfy sum_m w_m C_ml^2 = 1.
/// Throws NotNormalized otherwise.
SequentialEvaluation sequential_cost_at(const ProblemInstance& inst, const BasisChange& basis);

/// The same cost for arbitrary column scaling of C:
/// t^-2 [ sum_l (sum_m w_m C_ml^2)^{1/3} mu'_l^{2/3} ]^3.
double sequential_cost_general(const ProblemInstance& inst, const BasisChange& basis);

/// The identity scaled columnwise onto the weight ellipsoid, diag(1/sqrt(w)).
BasisChange normalized_identity(const Vector& w);

struct NaiveBounds {
  double lower;  // n^2 N / (d t^2)
  double upper;  // n^2 N / t^2
};

/// Requires equal weights (UnequalWeights otherwise).
NaiveBounds naive_equal_weight_bounds(const ProblemInstance& inst);

}  // namespace qsn
