#include "qsn/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qsn {
namespace {

double safe(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

}  // namespace

MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           const NelderMeadOptions& opts) {
  const std::size_t dim = x0.size();
  MinimizeResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    return safe(f(x));
  };
  if (dim == 0) {
    out.f = eval(x0);
    out.x = std::move(x0);
    return out;
  }

  std::vector<std::vector<double>> pts(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += opts.initial_step;
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);
  for (out.iterations = 0; out.iterations < opts.max_iterations; ++out.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];

    if (std::abs(vals[worst] - vals[best]) <= opts.f_tolerance && std::isfinite(vals[worst])) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += pts[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    for (std::size_t k = 0; k < dim; ++k) xr[k] = centroid[k] + (centroid[k] - pts[worst][k]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      for (std::size_t k = 0; k < dim; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - pts[worst][k]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    for (std::size_t k = 0; k < dim; ++k) {
      xc[k] = outside ? centroid[k] + 0.5 * (xr[k] - centroid[k])
                      : centroid[k] + 0.5 * (pts[worst][k] - centroid[k]);
    }
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < dim; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
      vals[i] = eval(pts[i]);
    }
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  out.f = *it;
  out.x = pts[static_cast<std::size_t>(it - vals.begin())];
  return out;
}

MinimizeResult compass_search(const Objective& f, std::vector<double> x0, double initial_step,
                              double min_step, int max_evaluations) {
  MinimizeResult out;
  out.x = std::move(x0);
  out.f = safe(f(out.x));
  out.evaluations = 1;

  const std::size_t dim = out.x.size();
  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < dim; ++i) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> d(dim, 0.0);
      d[i] = s;
      dirs.push_back(std::move(d));
    }
  }
  const double diag = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          std::vector<double> d(dim, 0.0);
          d[i] = si * diag;
          d[j] = sj * diag;
          dirs.push_back(std::move(d));
        }
      }
    }
  }

  double step = initial_step;
  std::vector<double> trial(dim);
  while (step >= min_step && out.evaluations < max_evaluations) {
    bool improved = false;
    for (const auto& d : dirs) {
      if (out.evaluations >= max_evaluations) break;
      for (std::size_t k = 0; k < dim; ++k) trial[k] = out.x[k] + step * d[k];
      const double v = safe(f(trial));
      ++out.evaluations;
      if (v < out.f) {
        out.f = v;
        out.x = trial;
        improved = true;
      }
    }
    ++out.iterations;
    if (!improved) step *= 0.5;
  }
  return out;
}

}  // namespace qsn
