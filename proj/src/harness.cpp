#include "qsn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qsn/copt.hpp"
#include "qsn/protocols.hpp"
#include "qsn/ssbound.hpp"

namespace qsn {
namespace {

template <class F>
void parallel_for(std::size_t count, F&& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
}

Vector gaussian_vector(int d, CounterRng& rng) {
  std::normal_distribution<double> normal;
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

template <class Fn>
double timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Check check_near(std::string name, double expected, double actual, double tol) {
  return {std::move(name), expected, actual, tol, std::abs(actual - expected) <= tol};
}

Check check_at_least(std::string name, double threshold, double actual) {
  return {std::move(name), threshold, actual, 0.0, actual >= threshold};
}

Check check_above(std::string name, double threshold, double actual) {
  return {std::move(name), threshold, actual, 0.0, actual > threshold};
}

Check check_at_most(std::string name, double threshold, double actual) {
  return {std::move(name), threshold, actual, 0.0, actual <= threshold};
}

}  // namespace

ProblemInstance sample_instance(int d, int n, std::span<const double> weights,
                                bool orthant_restricted, CounterRng& rng) {
  if (n < 1 || d < n) throw Error(ErrorCode::BadDimensions, "need 1 <= n <= d");
  if (static_cast<int>(weights.size()) != n) throw Error(ErrorCode::BadDimensions, "need n weights");
  const Vector w = Eigen::Map<const Vector>(weights.data(), n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix a(n, d);
    for (int l = 0; l < n; ++l) {
      Vector row = gaussian_vector(d, rng);
      if (orthant_restricted) row = row.cwiseAbs();
      a.row(l) = row.transpose() / row.norm();
    }
    try {
      return validate_and_normalize(a, w, 1.0).first;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient && e.code() != ErrorCode::ZeroRow) throw;
    }
  }
  throw Error(ErrorCode::BadParameters, "100 consecutive rank-deficient draws");
}

ProblemInstance near_duplicate_instance(const Vector& a_bar, int n, double delta,
                                        const Vector& weights, CounterRng& rng) {
  const int d = static_cast<int>(a_bar.size());
  if (n < 1 || n > d) throw Error(ErrorCode::BadDimensions, "need 1 <= n <= d");
  if (weights.size() != n) throw Error(ErrorCode::BadDimensions, "need n weights");
  const Vector center = a_bar.normalized();

  // n-1 orthonormal tangent directions at a_bar (at least one for n = 1).
  const int k = std::max(1, n - 1);
  if (k > d - 1 && d > 1) throw Error(ErrorCode::BadDimensions, "not enough room for the fan");
  std::vector<Vector> tangent;
  while (static_cast<int>(tangent.size()) < k) {
    Vector v = gaussian_vector(d, rng);
    v -= v.dot(center) * center;
    for (const Vector& u : tangent) v -= v.dot(u) * u;
    if (v.norm() > 1e-6) tangent.push_back(v.normalized());
  }

  // Regular simplex in the tangent space: e_l - 1/n expressed in the
  // Helmert basis of the complement of (1,...,1), then normalized.
  std::vector<Vector> spokes(static_cast<std::size_t>(n), Vector::Zero(d));
  if (n == 1) {
    spokes[0] = tangent[0];
  } else {
    for (int l = 0; l < n; ++l) {
      Vector coords(n - 1);
      for (int j = 1; j < n; ++j) {
        // Helmert vector h_j = (1,...,1,-j,0,...)/sqrt(j(j+1)) with j ones.
        const double hl = l < j ? 1.0 : (l == j ? -static_cast<double>(j) : 0.0);
        coords[j - 1] = hl / std::sqrt(static_cast<double>(j) * (j + 1));
      }
      coords.normalize();
      for (int j = 0; j < n - 1; ++j) spokes[l] += coords[j] * tangent[j];
    }
  }

  Matrix a(n, d);
  for (int l = 0; l < n; ++l) {
    a.row(l) = (std::cos(delta) * center + std::sin(delta) * spokes[l]).transpose();
  }
  const RankCheck rank = delta == 0.0 ? RankCheck::AllowDependent : RankCheck::Enforce;
  return validate_and_normalize(a, weights, 1.0, rank).first;
}

ProblemInstance example2_instance() {
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  Matrix a(1, 3);
  a << r2 + r3 + 1.0, r2 - r3 + 1.0, r2 - 2.0;
  a /= std::sqrt(18.0);
  Vector w(1);
  w << 1.0;
  return validate_and_normalize(a, w, 1.0).first;
}

void validate(const SweepConfig& config) {
  if (config.samples <= 0) throw Error(ErrorCode::BadParameters, "samples must be positive");
  if (config.n < 1) throw Error(ErrorCode::BadDimensions, "n must be positive");
  if (config.d_values.empty()) throw Error(ErrorCode::BadParameters, "no d values");
  for (int d : config.d_values) {
    if (d < config.n) {
      throw Error(ErrorCode::BadDimensions, "d = " + std::to_string(d) + " is smaller than n = " +
                                                std::to_string(config.n));
    }
  }
  if (static_cast<int>(config.weights.size()) != config.n) {
    throw Error(ErrorCode::BadDimensions, "need exactly n weights");
  }
  for (double w : config.weights) {
    if (!(w > 0.0)) throw Error(ErrorCode::NonPositive, "weights must be positive");
  }
  if (config.restarts < 0) throw Error(ErrorCode::BadParameters, "restarts must be non-negative");
}

SweepRecord evaluate_all(const ProblemInstance& inst, int instance_id, int restarts,
                         std::uint64_t seed, bool omega_fixed_to_ones) {
  SweepRecord r;
  r.instance_id = instance_id;
  r.d = inst.d();
  r.n = inst.n();
  r.omega_fixed_to_ones = omega_fixed_to_ones;
  r.wall.local = timed([&] { r.m_local = local_cost(inst).value; });
  r.wall.naive = timed([&] { r.m_naive = naive_cost(inst).first.value; });
  r.wall.ss = timed([&] {
    const SsBoundResult ss = omega_fixed_to_ones ? ss_cost_at(inst, SignVector::ones(inst.d()))
                                                 : ss_bound(inst);
    r.m_ss = ss.value;
    r.g_opt_omega = ss.G;
  });
  r.wall.opt = timed([&] {
    OptimizerOptions opts;
    opts.restarts = restarts;
    opts.seed = seed ^ (static_cast<std::uint64_t>(instance_id) * 0x9E3779B97F4A7C15ULL);
    r.m_opt = opt_sequential_cost(inst, opts).cost;
  });
  if (inst.n() == 2) r.alpha_dot = inst.A().row(0).dot(inst.A().row(1));
  return r;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
  validate(config);
  struct Job {
    int id;
    int d;
  };
  std::vector<Job> jobs;
  for (int d : config.d_values) {
    for (int s = 0; s < config.samples; ++s) jobs.push_back({static_cast<int>(jobs.size()), d});
  }
  const CounterRng root(config.seed);
  std::vector<SweepRecord> records(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(jobs[i].id));
    const ProblemInstance inst =
        sample_instance(jobs[i].d, config.n, config.weights, config.orthant_restricted, rng);
    records[i] = evaluate_all(inst, jobs[i].id, config.restarts, config.seed, config.orthant_restricted);
  });
  std::sort(records.begin(), records.end(),
            [](const SweepRecord& a, const SweepRecord& b) { return a.instance_id < b.instance_id; });
  return records;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << "instance_id,d,n,G_opt_omega,M_local,M_naive,M_ss,M_opt,alpha_dot\n";
  for (const SweepRecord& r : records) {
    out << r.instance_id << ',' << r.d << ',' << r.n << ',' << format_double(r.g_opt_omega) << ','
        << format_double(r.m_local) << ',' << format_double(r.m_naive) << ','
        << format_double(r.m_ss) << ',' << format_double(r.m_opt) << ','
        << (r.alpha_dot ? format_double(*r.alpha_dot) : std::string()) << '\n';
  }
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string Report::to_json() const {
  nlohmann::json doc{{"name", name}, {"checks", nlohmann::json::array()}, {"notes", notes}, {"pass", passed()}};
  for (const Check& c : checks) {
    doc["checks"].push_back(
        {{"name", c.name}, {"expected", c.expected}, {"actual", c.actual}, {"tol", c.tol}, {"pass", c.pass}});
  }
  return doc.dump(2) + '\n';
}

std::string Report::to_text() const {
  std::ostringstream out;
  out << name << '\n';
  for (const Check& c : checks) {
    char line[256];
    std::snprintf(line, sizeof line, "  [%s] %-44s expected %-12.6g actual %-14.8g tol %.3g\n",
                  c.pass ? "PASS" : "FAIL", c.name.c_str(), c.expected, c.actual, c.tol);
    out << line;
  }
  for (const std::string& note : notes) out << "  note: " << note << '\n';
  return out.str();
}

Report reproduce_example2() {
  Report report{"example2", {}, {}};
  const ProblemInstance inst = example2_instance();
  const double m_opt = opt_sequential_cost(inst).cost;
  const double m_ss_ones = ss_cost_at(inst, SignVector::ones(3)).value;
  const double m_ss_signed = ss_cost_at(inst, SignVector::from({1.0, 1.0, -1.0})).value;
  report.checks.push_back(check_near("M_opt", 0.9551, m_opt, 5e-4));
  report.checks.push_back(check_near("M_ss(omega=(1,1,1))", 1.0, m_ss_ones, 5e-4));
  report.checks.push_back(check_near("M_ss(omega=(1,1,-1))", 0.9554, m_ss_signed, 5e-4));
  const SsBoundResult best = ss_bound(inst);
  report.notes.push_back("best sign vector over all 4 canonical choices gives " +
                         format_double(best.value));
  return report;
}

Vector example1_direction(int d, int kappa, double x, double y) {
  Vector a(d);
  for (int i = 0; i < d; ++i) a[i] = i < kappa ? x : y;
  return a / std::sqrt((x * x - y * y) * kappa + y * y * d);
}

Report reproduce_example1(const std::vector<int>& d_values, double x, double y, double beta,
                          double delta_scale, std::vector<Example1Row>* rows, int restarts) {
  if (!(x > y)) throw Error(ErrorCode::BadParameters, "need x > y");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorCode::BadParameters, "need beta in [0, 1)");
  if (!(delta_scale >= 0.0)) throw Error(ErrorCode::BadParameters, "delta scale must be non-negative");
  if (d_values.empty()) throw Error(ErrorCode::BadParameters, "no d values");
  for (int d : d_values) {
    const int kappa = static_cast<int>(std::lround(std::pow(static_cast<double>(d), beta)));
    if (kappa < 1 || kappa >= d) {
      throw Error(ErrorCode::BadParameters, "kappa = round(d^beta) = " + std::to_string(kappa) +
                                                " must lie in [1, d) for d = " + std::to_string(d));
    }
  }

  Report report{"example1", {}, {}};
  std::vector<Example1Row> out;
  const Vector w = Vector::Ones(2);
  for (int d : d_values) {
    Example1Row row;
    row.d = d;
    row.kappa = static_cast<int>(std::lround(std::pow(static_cast<double>(d), beta)));
    row.delta = delta_scale / std::sqrt(static_cast<double>(d));
    const Vector a_bar = example1_direction(d, row.kappa, x, y);
    CounterRng rng(0xE1ULL, static_cast<std::uint64_t>(d));
    const ProblemInstance inst = near_duplicate_instance(a_bar, 2, row.delta, w, rng);
    OptimizerOptions opts;
    opts.restarts = restarts;
    row.m_opt = opt_sequential_cost(inst, opts).cost;
    row.m_ss = ss_bound(inst).value;
    row.ratio = row.m_ss / row.m_opt;
    row.prediction = inst.weight_sum() * a_bar.array().square().maxCoeff();
    out.push_back(row);
    report.notes.push_back("d=" + std::to_string(d) + " kappa=" + std::to_string(row.kappa) +
                           " M_opt=" + format_double(row.m_opt) + " M_ss=" + format_double(row.m_ss) +
                           " ratio=" + format_double(row.ratio));
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    report.checks.push_back(check_above("ratio(d=" + std::to_string(out[i].d) + ") - ratio(d=" +
                                            std::to_string(out[i - 1].d) + ")",
                                        0.0, out[i].ratio - out[i - 1].ratio));
  }
  if (rows) *rows = std::move(out);
  return report;
}

Report reproduce_fig3(const SweepConfig& config, std::vector<SweepRecord>* records) {
  std::vector<SweepRecord> recs = run_sweep(config);
  Report report{"fig3", {}, {}};
  if (config.orthant_restricted) {
    report.notes.push_back("orthant samples: M_ss evaluated at omega = (1,...,1) only");
  }
  report.notes.push_back("thresholds at d = 2 and d = 64 are desk-scale readings of the scatter plot");

  for (int d : config.d_values) {
    int count = 0;
    int ss_not_worse = 0;
    int opt_better = 0;
    double ss_min = 1e300;
    double ss_max = -1e300;
    for (const SweepRecord& r : recs) {
      if (r.d != d) continue;
      ++count;
      if (r.m_ss <= r.m_opt + 1e-9) ++ss_not_worse;
      if (r.m_opt < r.m_ss) ++opt_better;
      ss_min = std::min(ss_min, r.m_ss);
      ss_max = std::max(ss_max, r.m_ss);
    }
    const std::string tag = "d=" + std::to_string(d);
    if (d == 2) {
      report.checks.push_back(check_at_least(tag + " fraction M_ss <= M_opt", 1.0,
                                             static_cast<double>(ss_not_worse) / count));
      if (config.n == 2) {
        const double n_weight = config.weights[0] + config.weights[1];
        report.checks.push_back(check_at_least(tag + " min M_ss >= N/d", n_weight / 2.0 - 1e-9, ss_min));
        report.checks.push_back(check_at_most(tag + " max M_ss <= N", n_weight + 1e-9, ss_max));
      }
    }
    if (d == 64) {
      report.checks.push_back(check_above(tag + " fraction M_opt < M_ss", 0.9,
                                          static_cast<double>(opt_better) / count));
    }
    report.notes.push_back(tag + ": fraction M_opt < M_ss = " +
                           format_double(static_cast<double>(opt_better) / count));
  }

  double worst_ss_excess = -1e300;
  double worst_opt_excess = -1e300;
  for (const SweepRecord& r : recs) {
    worst_ss_excess = std::max(worst_ss_excess, r.m_ss - r.m_local);
    worst_opt_excess = std::max(worst_opt_excess, r.m_opt - r.m_naive);
  }
  report.checks.push_back(check_at_most("max over records of M_ss - M_local", 1e-9, worst_ss_excess));
  report.checks.push_back(check_at_most("max over records of M_opt - M_naive", 1e-9, worst_opt_excess));
  if (records) *records = std::move(recs);
  return report;
}

Report reproduce_fig4(int samples, std::uint64_t seed, std::vector<Fig4Point>* points, int restarts) {
  if (samples <= 0) throw Error(ErrorCode::BadParameters, "samples must be positive");
  const std::vector<double> weights{1.0, 1.0};
  const CounterRng root(seed);
  std::vector<Fig4Point> pts(static_cast<std::size_t>(samples));
  parallel_for(pts.size(), [&](std::size_t i) {
    CounterRng rng = root.split(i);
    const ProblemInstance inst = sample_instance(2, 2, weights, false, rng);
    OptimizerOptions opts;
    opts.restarts = restarts;
    opts.seed = seed ^ (i * 0x9E3779B97F4A7C15ULL);
    pts[i] = {inst.A().row(0).dot(inst.A().row(1)), opt_sequential_cost(inst, opts).cost};
  });

  Report report{"fig4", {}, {}};
  double bin_sum = 0.0;
  int bin_count = 0;
  double lo = 1e300;
  double hi = -1e300;
  for (const Fig4Point& p : pts) {
    if (std::abs(p.alpha_dot) <= 0.05) {
      bin_sum += p.m_opt;
      ++bin_count;
    }
    lo = std::min(lo, p.m_opt);
    hi = std::max(hi, p.m_opt);
  }
  report.checks.push_back(check_at_least("samples in |alpha_1.alpha_2| <= 0.05", 1.0, bin_count));
  report.checks.push_back(
      check_near("mean M_opt for |alpha_1.alpha_2| <= 0.05", 4.0, bin_count ? bin_sum / bin_count : 0.0, 0.1));
  report.checks.push_back(check_at_least("min M_opt >= N/d", 1.0 - 1e-9, lo));
  report.checks.push_back(check_at_most("max M_opt <= 4", 4.0 + 1e-6, hi));

  // Overlap limit along the diagonal, where N max_i a_bar_i^2 = 1.
  const Vector w = Vector::Ones(2);
  const Vector diag = Vector::Ones(2).normalized();
  for (double spread : {1e-2, 1e-4, 1e-6}) {
    CounterRng rng(seed, 0xF4ULL);
    const ProblemInstance inst = near_duplicate_instance(diag, 2, spread, w, rng);
    const double dot = inst.A().row(0).dot(inst.A().row(1));
    const double m = opt_sequential_cost(inst).cost;
    report.notes.push_back("alpha_1.alpha_2 = " + format_double(dot) + " -> M_opt = " + format_double(m));
    if (spread == 1e-6) report.checks.push_back(check_near("M_opt as alpha_1.alpha_2 -> 1 on the diagonal", 1.0, m, 1e-3));
  }
  if (points) *points = std::move(pts);
  return report;
}

void write_fig4_csv(std::ostream& out, std::span<const Fig4Point> points) {
  out << "alpha_dot,M_opt\n";
  for (const Fig4Point& p : points) out << format_double(p.alpha_dot) << ',' << format_double(p.m_opt) << '\n';
}

}  // namespace qsn
