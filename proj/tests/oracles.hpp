#pragma once

// Reference computations used only by tests. Nothing here calls into the
// library's cost code; each oracle works from the raw formulas.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "qsn/core.hpp"
#include "qsn/rng.hpp"

namespace qsn::oracle {

/// Minimum of a unimodal function on [lo, hi].
inline double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                                 int iterations = 300) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return std::min({f1, f2, f(0.5 * (a + b))});
}

/// Cramér-Rao cost of the correlated sign-symmetric state written out per
/// function: sum_l w_l (1 + (d-2-g_l) J) / ((1-J)(1+(d-1)J)) / t^2 with
/// g_l = (alpha_l . omega)^2 - 1.
inline double crb_scalar(const ProblemInstance& inst, const std::vector<double>& omega, double J) {
  const int d = inst.d();
  double total = 0.0;
  for (int l = 0; l < inst.n(); ++l) {
    double p = 0.0;
    for (int i = 0; i < d; ++i) p += inst.A()(l, i) * omega[static_cast<std::size_t>(i)];
    const double g = p * p - 1.0;
    total += inst.w()[l] * (1.0 + (d - 2.0 - g) * J) / ((1.0 - J) * (1.0 + (d - 1.0) * J));
  }
  return total / (inst.t() * inst.t());
}

/// sum_l k_l / t_l^2.
inline double allocation_cost(const std::vector<double>& k, const std::vector<double>& times) {
  double s = 0.0;
  for (std::size_t l = 0; l < k.size(); ++l) s += k[l] / (times[l] * times[l]);
  return s;
}

/// Sequential cost for n = 2 with columns (cos p/sqrt(w1), sin p/sqrt(w2))
/// and (cos q/sqrt(w1), sin q/sqrt(w2)); the 2x2 inverse is written out.
inline double two_function_cost(const Eigen::MatrixXd& A, double w1, double w2, double t, double p,
                                double q) {
  const double c11 = std::cos(p) / std::sqrt(w1);
  const double c21 = std::sin(p) / std::sqrt(w2);
  const double c12 = std::cos(q) / std::sqrt(w1);
  const double c22 = std::sin(q) / std::sqrt(w2);
  const double det = c11 * c22 - c12 * c21;
  if (std::abs(det) < 1e-14) return std::numeric_limits<double>::infinity();
  double m1 = 0.0;
  double m2 = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    m1 = std::max(m1, std::abs((c22 * A(0, j) - c12 * A(1, j)) / det));
    m2 = std::max(m2, std::abs((-c21 * A(0, j) + c11 * A(1, j)) / det));
  }
  const double s = std::cbrt(m1 * m1) + std::cbrt(m2 * m2);
  return s * s * s / (t * t);
}

struct GridResult {
  double raw;      // best value on the uniform grid
  double refined;  // after zooming into the best cells
};

/// Dense search over (p, q) in [0, pi)^2 at the given resolution, followed by
/// repeated 41x41 zoomed grids around the best few cells.
inline GridResult two_function_grid(const Eigen::MatrixXd& A, double w1, double w2, double t,
                                    double step = 1e-3, int candidates = 24) {
  const double pi = std::acos(-1.0);
  const int m = static_cast<int>(std::ceil(pi / step));
  using Cell = std::pair<double, std::pair<double, double>>;
  std::priority_queue<Cell> best;  // max-heap of the smallest values
  for (int i = 0; i < m; ++i) {
    const double p = i * step;
    for (int j = i + 1; j < m; ++j) {
      const double q = j * step;
      const double v = two_function_cost(A, w1, w2, t, p, q);
      if (static_cast<int>(best.size()) < candidates) {
        best.push({v, {p, q}});
      } else if (v < best.top().first) {
        best.pop();
        best.push({v, {p, q}});
      }
    }
  }
  GridResult out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  while (!best.empty()) {
    auto [v, pq] = best.top();
    best.pop();
    out.raw = std::min(out.raw, v);
    double cp = pq.first;
    double cq = pq.second;
    double cv = v;
    for (double h = step; h > 1e-13; h /= 8.0) {
      double bp = cp;
      double bq = cq;
      for (int a = -20; a <= 20; ++a) {
        for (int b = -20; b <= 20; ++b) {
          const double pp = cp + a * h / 10.0;
          const double qq = cq + b * h / 10.0;
          const double val = two_function_cost(A, w1, w2, t, pp, qq);
          if (val < cv) {
            cv = val;
            bp = pp;
            bq = qq;
          }
        }
      }
      cp = bp;
      cq = bq;
    }
    out.refined = std::min(out.refined, cv);
  }
  return out;
}

/// Standard-normal rows scaled to unit length; no rank check.
inline Matrix random_unit_rows(int n, int d, CounterRng& rng) {
  std::normal_distribution<double> normal;
  Matrix a(n, d);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < d; ++i) a(l, i) = normal(rng);
    a.row(l).normalize();
  }
  return a;
}

inline int uniform_int(CounterRng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform01() * (hi - lo + 1));
}

inline double uniform(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

}  // namespace qsn::oracle
