#pragma once

// Experiment harness: random instances, strategy-comparison sweeps, the two
// worked examples and the two scatter-plot reproductions, with CSV and JSON
// emitters.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsn/core.hpp"
#include "qsn/rng.hpp"

namespace qsn {

/// Rows are independent standard-normal d-vectors (absolute-valued when
/// orthant_restricted), scaled to unit length, redrawn until rank n. Throws
/// BadParameters after 100 rank-deficient draws.
ProblemInstance sample_instance(int d, int n, std::span<const double> weights,
                                bool orthant_restricted, CounterRng& rng);

/// n rows at angle delta from the unit vector a_bar, spread symmetrically in a
/// 2-plane (n = 2) or on a regular fan in the tangent space (n > 2) so that
/// a_bar is their mean direction.
ProblemInstance near_duplicate_instance(const Vector& a_bar, int n, double delta,
                                        const Vector& weights, CounterRng& rng);

/// The single-function, three-sensor example with G(1,1,1) = 0.
ProblemInstance example2_instance();

struct SweepConfig {
  std::vector<int> d_values{2, 8, 64};
  int n = 2;
  int samples = 200;
  std::vector<double> weights{1.0, 1.0};
  std::uint64_t seed = 20210915;
  int restarts = 64;
  bool orthant_restricted = true;
};

/// Throws BadParameters / BadDimensions for an inconsistent config.
void validate(const SweepConfig& config);

struct WallTimes {
  double local = 0, naive = 0, ss = 0, opt = 0;  // seconds
};

struct SweepRecord {
  int instance_id = 0;
  int d = 0;
  int n = 0;
  double g_opt_omega = 0;  // G at the sign vector used for m_ss
  double m_local = 0;
  double m_naive = 0;
  double m_ss = 0;
  double m_opt = 0;
  std::optional<double> alpha_dot;  // alpha_1 . alpha_2, n = 2 only
  bool omega_fixed_to_ones = false;
  WallTimes wall;
};

/// All four strategies on one instance. With omega_fixed_to_ones the
/// sensor-symmetric bound is taken at omega = (1,...,1) only.
SweepRecord evaluate_all(const ProblemInstance& inst, int instance_id, int restarts,
                         std::uint64_t seed, bool omega_fixed_to_ones);

/// Samples are evaluated in parallel; records come back sorted by
/// instance_id so the output never depends on scheduling.
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

/// Columns: instance_id,d,n,G_opt_omega,M_local,M_naive,M_ss,M_opt,alpha_dot
void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records);

struct Check {
  std::string name;
  double expected = 0;
  double actual = 0;
  double tol = 0;
  bool pass = false;
};

struct Report {
  std::string name;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  bool passed() const;
  /// {"checks": [{"name", "expected", "actual", "tol", "pass"}], ...}
  std::string to_json() const;
  std::string to_text() const;
};

Report reproduce_example2();

struct Example1Row {
  int d = 0;
  int kappa = 0;
  double delta = 0;
  double m_opt = 0;
  double m_ss = 0;
  double ratio = 0;       // m_ss / m_opt
  double prediction = 0;  // N max_i a_bar_i^2 / t^2
};

/// Nearly overlapping pair around a_bar = (x,...,x, y,...,y)/norm with
/// kappa = round(d^beta) leading x entries; asserts m_ss/m_opt increases
/// with d. Throws BadParameters unless x > y, beta in [0,1) and
/// 1 <= kappa < d for every d.
Report reproduce_example1(const std::vector<int>& d_values, double x, double y, double beta,
                          double delta_scale, std::vector<Example1Row>* rows = nullptr,
                          int restarts = 64);

/// The unit vector of the example-1 family.
Vector example1_direction(int d, int kappa, double x, double y);

Report reproduce_fig3(const SweepConfig& config, std::vector<SweepRecord>* records = nullptr);

struct Fig4Point {
  double alpha_dot;
  double m_opt;
};

/// n = 2, d = 2, unrestricted directions, w = (1,1).
Report reproduce_fig4(int samples, std::uint64_t seed, std::vector<Fig4Point>* points = nullptr,
                      int restarts = 64);

void write_fig4_csv(std::ostream& out, std::span<const Fig4Point> points);

}  // namespace qsn
