#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qsn {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  int max_iterations = 2000;
  double f_tolerance = 1e-10;  // stop when the simplex's value spread falls below this
  double initial_step = 0.25;
};

struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Downhill simplex with the standard reflection/expansion/contraction/shrink
/// coefficients (1, 2, 1/2, 1/2). Non-finite objective values are treated as
/// +infinity.
MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const NelderMeadOptions& opts = {});

/// Pattern search from x0 over the directions +-e_i and +-e_i +- e_j, halving
/// the step until it drops below min_step. Used to finish off simplex runs
/// that stall on a kink of a piecewise-smooth objective; the pairwise
/// directions let it slide along kinks that no single coordinate follows.
MinimizeResult compass_search(const Objective& f, std::vector<double> x0, double initial_step,
                              double min_step, int max_evaluations);

}  // namespace qsn
