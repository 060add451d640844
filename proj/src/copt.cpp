#include "qsn/copt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "qsn/kernels.hpp"
#include "qsn/nelder_mead.hpp"
#include "qsn/rng.hpp"

namespace qsn {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kPolishedCandidates = 8;

void sphere_point(std::span<const double> theta, std::span<double> out) {
  const std::size_t m = theta.size();
  double prefix = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    out[k] = prefix * std::cos(theta[k]);
    prefix *= std::sin(theta[k]);
  }
  out[m] = prefix;
}

// Inverse of sphere_point for a unit vector u, with the sign of u chosen so
// that the last angle lands in [0, pi).
void sphere_angles(std::vector<double> u, std::span<double> theta) {
  const std::size_t n = u.size();
  const double last = u[n - 1];
  const double before = u[n - 2];
  if (last < 0.0 || (last == 0.0 && before < 0.0)) {
    for (double& x : u) x = -x;
  }
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) tail += u[i] * u[i];
    theta[k] = std::atan2(std::sqrt(tail), u[k]);
  }
  double a = std::atan2(u[n - 1], u[n - 2]);
  if (a >= kPi) a -= kPi;
  theta[n - 2] = a;
}

void require_weights(const std::vector<double>& w) {
  if (w.empty()) throw Error(ErrorCode::BadDimensions, "chart has no weights");
  for (double x : w) {
    if (!(x > 0.0)) throw Error(ErrorCode::NonPositive, "chart weights must be positive");
  }
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

namespace {

Eigen::MatrixXd chart_matrix(const AngleChart& chart) {
  require_weights(chart.weights);
  const int n = chart.n();
  const auto per = static_cast<std::size_t>(n - 1);
  if (chart.angles.size() != per * static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::BadDimensions, "chart needs n(n-1) angles");
  }
  Eigen::MatrixXd c(n, n);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    if (n == 1) {
      col[0] = 1.0;
    } else {
      sphere_point(std::span<const double>(chart.angles).subspan(l * per, per), col);
    }
    for (int m = 0; m < n; ++m) c(m, l) = col[m] / std::sqrt(chart.weights[m]);
  }
  return c;
}

}  // namespace

BasisChange chart_to_C(const AngleChart& chart) { return BasisChange::try_from_matrix(chart_matrix(chart)); }

AngleChart C_to_chart(const Eigen::MatrixXd& C, const std::vector<double>& weights) {
  require_weights(weights);
  const int n = static_cast<int>(weights.size());
  if (C.rows() != n || C.cols() != n) throw Error(ErrorCode::DimensionMismatch, "C does not match weights");
  AngleChart chart{std::vector<double>(static_cast<std::size_t>(n) * (n - 1)), weights};
  if (n == 1) return chart;
  const auto per = static_cast<std::size_t>(n - 1);
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    double norm = 0.0;
    for (int m = 0; m < n; ++m) {
      u[m] = std::sqrt(weights[m]) * C(m, l);
      norm += u[m] * u[m];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) throw Error(ErrorCode::SingularC, "C has a zero column");
    for (double& x : u) x /= norm;
    sphere_angles(u, std::span<double>(chart.angles).subspan(l * per, per));
  }
  return chart;
}

AngleChart canonical_chart(const AngleChart& chart) {
  return C_to_chart(chart_to_C(chart).C(), chart.weights);
}

namespace {

// mu'-part of the objective; evaluates C^{-1} A row by row through the
// kernel layer.
double constrained_cost(const ProblemInstance& inst, const Eigen::MatrixXd& cinv) {
  const int n = inst.n();
  const auto d = static_cast<std::size_t>(inst.d());
  double coeffs[16];
  std::vector<double> heap;
  double* buf = coeffs;
  if (n > 16) {
    heap.resize(static_cast<std::size_t>(n));
    buf = heap.data();
  }
  double s = 0.0;
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) buf[m] = cinv(l, m);
    const double mu = kernels::combination_abs_max({buf, static_cast<std::size_t>(n)}, inst.A().data(), d, d);
    s += std::cbrt(mu * mu);
  }
  const double t = inst.t();
  return s * s * s / (t * t);
}

// cond_2(C) <= |C|_F |C^{-1}|_F, so the SVD is only needed when that cheap
// bound crosses the penalty threshold; below it the factor is exactly 1.
double penalized(const ProblemInstance& inst, const Eigen::MatrixXd& c) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!c.allFinite()) return inf;
  Eigen::MatrixXd cinv = c.partialPivLu().inverse();
  if (!cinv.allFinite()) return inf;
  if (c.norm() * cinv.norm() <= kMaxConditionNumber) return constrained_cost(inst, cinv);
  const BasisChange basis = BasisChange::try_from_matrix(c);
  if (basis.singular() || !std::isfinite(basis.condition_number())) return inf;
  const double factor = 1.0 + std::max(0.0, basis.condition_number() / kMaxConditionNumber - 1.0);
  return constrained_cost(inst, basis.Cinv()) * factor;
}

// The cost is unchanged when row l of C^{-1} is rescaled, so take rows
// b_l with max_j |b_l . a_j| = 1. Then the cost is [sum_l (c_l^T W c_l)^{1/3}]^3
// with c_l the columns of B^{-1}: smooth in B, and each b_l ranges over the
// polytope |b . a_j| <= 1. Minima sit on faces of that polytope, which is
// where the angle-space search has kinks and crawls. Holding the active
// constraints as equalities leaves a smooth problem on the face.
std::optional<Eigen::MatrixXd> refine_on_active_faces(const ProblemInstance& inst, const Eigen::MatrixXd& c,
                                                      double tol) {
  const int n = inst.n();
  const Eigen::MatrixXd cinv = c.partialPivLu().inverse();
  if (!cinv.allFinite()) return std::nullopt;
  const Eigen::MatrixXd proj = cinv * inst.A();

  std::vector<Eigen::VectorXd> base(static_cast<std::size_t>(n));
  std::vector<Eigen::MatrixXd> free(static_cast<std::size_t>(n));
  int dim = 0;
  for (int l = 0; l < n; ++l) {
    const double mu = proj.row(l).cwiseAbs().maxCoeff();
    if (!(mu > 0.0)) return std::nullopt;
    const Eigen::VectorXd b = cinv.row(l).transpose() / mu;
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < proj.cols(); ++j) {
      if (std::abs(proj(l, j)) / mu >= 1.0 - tol) active.push_back(j);
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(active.size()), n);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Eigen::Index j = active[k];
      m.row(static_cast<Eigen::Index>(k)) = (proj(l, j) < 0.0 ? -1.0 : 1.0) * inst.A().col(j).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    const auto rank = svd.rank();
    const Eigen::VectorXd residual = m * b - Eigen::VectorXd::Ones(m.rows());
    base[l] = b - svd.solve(residual);
    free[l] = svd.matrixV().rightCols(n - rank);
    dim += static_cast<int>(n - rank);
  }

  const Vector& w = inst.w();
  auto assemble = [&](std::span<const double> z) {
    Eigen::MatrixXd bmat(n, n);
    std::size_t k = 0;
    for (int l = 0; l < n; ++l) {
      Eigen::VectorXd row = base[l];
      for (Eigen::Index f = 0; f < free[l].cols(); ++f) row += z[k++] * free[l].col(f);
      bmat.row(l) = row.transpose();
    }
    return bmat;
  };
  const Objective face_cost = [&](std::span<const double> z) {
    const Eigen::MatrixXd cm = assemble(z).partialPivLu().inverse();
    if (!cm.allFinite()) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += std::cbrt((w.array() * cm.col(l).array().square()).sum());
    return s * s * s;
  };

  std::vector<double> z(static_cast<std::size_t>(dim), 0.0);
  if (dim > 0) {
    NelderMeadOptions nm;
    nm.max_iterations = 4000;
    nm.f_tolerance = 0.0;
    for (double step : {1e-3, 1e-5, 1e-7}) {
      nm.initial_step = step;
      MinimizeResult res = nelder_mead(face_cost, z, nm);
      if (res.f < face_cost(z)) z = std::move(res.x);
    }
  }
  Eigen::MatrixXd out = assemble(z).partialPivLu().inverse();
  if (!out.allFinite()) return std::nullopt;
  for (int l = 0; l < n; ++l) out.col(l) /= std::sqrt((w.array() * out.col(l).array().square()).sum());
  return out;
}

struct Start {
  std::string label;
  std::vector<double> angles;
};

}  // namespace

double sequential_chart_objective(const ProblemInstance& inst, const AngleChart& chart) {
  return penalized(inst, chart_matrix(chart));
}

SequentialPlan opt_sequential_cost(const ProblemInstance& inst, const OptimizerOptions& opts) {
  const int n = inst.n();
  const std::vector<double> weights = to_std(inst.w());

  if (n == 1) {
    Eigen::MatrixXd c(1, 1);
    c(0, 0) = 1.0 / std::sqrt(weights[0]);
    BasisChange basis = BasisChange::from_matrix(c);
    SequentialEvaluation eval = sequential_cost_at(inst, basis);
    const double t = inst.t();
    const double amax = inst.A().row(0).cwiseAbs().maxCoeff();
    const double cost = weights[0] * amax * amax / (t * t);
    return {std::move(basis), std::move(eval.times), std::move(eval.mu_prime), cost, 0, "single-function"};
  }

  std::vector<Start> starts;
  starts.push_back({"identity", C_to_chart(normalized_identity(inst.w()).C(), weights).angles});
  {
    // C = L with A A^T = L L^T makes the measured rows L^{-1} A orthonormal.
    // A A^T does not see the order of the sensors.
    const Eigen::MatrixXd gram = inst.A() * inst.A().transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
      const Eigen::MatrixXd l = llt.matrixL();
      if (l.allFinite() && (l.diagonal().array().abs() > 1e-12).all()) {
        starts.push_back({"orthonormal-rows", C_to_chart(l, weights).angles});
      }
    }
  }
  if (overlap_analysis(inst).delta < 0.2) {
    starts.push_back({"saturating", C_to_chart(saturating_C(inst.w(), 0).C(), weights).angles});
  }
  const CounterRng root(opts.seed);
  const std::size_t dim = static_cast<std::size_t>(n) * (n - 1);
  for (int r = 0; r < opts.restarts; ++r) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(r));
    std::vector<double> angles(dim);
    for (double& a : angles) a = 2.0 * kPi * rng.uniform01();
    starts.push_back({"random-" + std::to_string(r), std::move(angles)});
  }

  // The search runs at unit time so that its tolerances, and therefore its
  // path, do not depend on t; the cost scales exactly as 1/t^2.
  const ProblemInstance unit = inst.with_time(1.0);
  AngleChart chart{{}, weights};
  const Objective objective = [&](std::span<const double> x) {
    chart.angles.assign(x.begin(), x.end());
    return sequential_chart_objective(unit, chart);
  };

  NelderMeadOptions nm;
  nm.max_iterations = opts.max_iterations;
  nm.f_tolerance = opts.tolerance;

  struct Candidate {
    MinimizeResult res;
    std::string label;
  };
  std::vector<Candidate> found;
  found.reserve(starts.size());
  for (const Start& s : starts) {
    nm.initial_step = 0.25;
    MinimizeResult res = nelder_mead(objective, s.angles, nm);
    // Re-seed the simplex at the incumbent until a fresh simplex stops
    // helping; the objective has kinks where a simplex can collapse early.
    for (int again = 0; again < 4; ++again) {
      nm.initial_step = 0.05;
      MinimizeResult next = nelder_mead(objective, res.x, nm);
      const bool helped = next.f < res.f - opts.tolerance;
      if (next.f < res.f) res = std::move(next);
      if (!helped) break;
    }
    found.push_back({std::move(res), s.label});
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Candidate& a, const Candidate& b) { return a.res.f < b.res.f; });

  // Only the most promising basins get the expensive finish: alternate
  // pattern search and small simplexes until neither moves, then solve
  // exactly on the polytope face the point has landed on.
  const std::size_t polish = std::min<std::size_t>(found.size(), kPolishedCandidates);
  for (std::size_t i = 0; i < polish; ++i) {
    MinimizeResult& res = found[i].res;
    for (int round = 0; round < 6; ++round) {
      const double before = res.f;
      MinimizeResult polished = compass_search(objective, res.x, 1e-3, 1e-12, 20000);
      if (polished.f < res.f) res = std::move(polished);
      nm.initial_step = 1e-3;
      MinimizeResult next = nelder_mead(objective, res.x, nm);
      if (next.f < res.f) res = std::move(next);
      if (!(res.f < before * (1.0 - 1e-15))) break;
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (double tol : {1e-5, 1e-7, 1e-9}) {
        chart.angles = res.x;
        const std::optional<Eigen::MatrixXd> refined = refine_on_active_faces(unit, chart_matrix(chart), tol);
        if (!refined) continue;
        std::vector<double> x = C_to_chart(*refined, weights).angles;
        const double f = objective(x);
        if (f < res.f) {
          res.f = f;
          res.x = std::move(x);
        }
      }
    }
  }
  const auto best = std::min_element(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(polish),
                                     [](const Candidate& a, const Candidate& b) { return a.res.f < b.res.f; });
  std::vector<double> best_x = std::move(best->res.x);
  std::string best_label = std::move(best->label);

  chart.angles = best_x;
  BasisChange basis = chart_to_C(chart);
  SequentialEvaluation eval = sequential_cost_at(inst, basis);
  return {std::move(basis), std::move(eval.times), std::move(eval.mu_prime), eval.cost,
          opts.restarts, std::move(best_label)};
}

BasisChange saturating_C(const Vector& w, int p_star) {
  const auto n = static_cast<int>(w.size());
  if (n < 2) throw Error(ErrorCode::BadDimensions, "saturating construction needs n >= 2");
  if (p_star < 0 || p_star >= n) {
    throw Error(ErrorCode::BadIndex, "p_star = " + std::to_string(p_star) + " outside [0, " +
                                         std::to_string(n) + ")");
  }
  for (Eigen::Index m = 0; m < w.size(); ++m) {
    if (!(w[m] > 0.0)) throw Error(ErrorCode::NonPositive, "weights must be positive");
  }

  // Helmert basis of the complement of (1,...,1): h_k = (1,...,1,-k,0,...)
  // with k ones, for k = 1..n-1.
  Eigen::MatrixXd c(n, n);
  const double n_weight = w.sum();
  int next = 1;
  for (int l = 0; l < n; ++l) {
    if (l == p_star) {
      c.col(l).setConstant(1.0 / std::sqrt(n_weight));
      continue;
    }
    const int k = next++;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
    h.head(k).setOnes();
    h[k] = -static_cast<double>(k);
    const double scale = std::sqrt((w.array() * h.array().square()).sum());
    c.col(l) = h / scale;
  }
  return BasisChange::from_matrix(std::move(c));
}

OverlapAnalysis overlap_analysis(const ProblemInstance& inst) {
  const Matrix& a = inst.A();
  const int n = inst.n();

  auto mean_angle = [&](const Vector& v) {
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += std::acos(std::clamp(a.row(l).dot(v), -1.0, 1.0));
    return s / n;
  };

  Vector abar = a.colwise().sum().transpose();
  if (abar.norm() < 1e-12) abar = a.row(0).transpose();
  abar.normalize();

  double f = mean_angle(abar);
  double step = 0.5;
  for (int iter = 0; iter < 100000; ++iter) {
    // Riemannian gradient: minus the mean of unit tangents toward each row.
    Vector grad = Vector::Zero(abar.size());
    for (int l = 0; l < n; ++l) {
      const double c = std::clamp(a.row(l).dot(abar), -1.0, 1.0);
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      if (s < 1e-15) continue;
      grad -= (a.row(l).transpose() - c * abar) / s;
    }
    grad /= n;
    const double gnorm = grad.norm();
    if (gnorm == 0.0 || step * gnorm < 1e-12) break;

    Vector trial = (abar - step * grad).normalized();
    const double ft = mean_angle(trial);
    if (ft < f) {
      abar = std::move(trial);
      f = ft;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }

  OverlapAnalysis out;
  out.a_bar = abar;
  out.deltas.resize(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    out.deltas[l] = std::acos(std::clamp(a.row(l).dot(abar), -1.0, 1.0));
    out.delta = std::max(out.delta, out.deltas[l]);
  }
  return out;
}

double nearly_overlapping_prediction(const ProblemInstance& inst) {
  const OverlapAnalysis ov = overlap_analysis(inst);
  const double limit = 0.2 / std::sqrt(static_cast<double>(inst.d()));
  if (!(ov.delta < limit)) {
    throw Error(ErrorCode::DeltaTooLarge, "delta = " + format_double(ov.delta) +
                                              " is not below 0.2/sqrt(d) = " + format_double(limit));
  }
  const double t = inst.t();
  return inst.weight_sum() * ov.a_bar.array().square().maxCoeff() / (t * t);
}

}  // namespace qsn
