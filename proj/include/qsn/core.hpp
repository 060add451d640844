#pragma once

// Domain types shared by every strategy: the estimation task (coefficient
// matrix, weights, total time), the weight-absorption report produced while
// normalizing it, and the reported cost of a strategy.

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qsn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  ZeroRow,
  RankDeficient,
  BadDimensions,
  NonPositive,
  NonFinite,
  ParseError,
  Io,
  SingularC,
  NotNormalized,
  NonPositiveK,
  UnequalWeights,
  GOutOfRange,
  BadIndex,
  DeltaTooLarge,
  DimensionMismatch,
  BadParameters,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Whether linearly dependent rows are rejected. Dependent rows are only
/// meaningful for the limiting "identical functions" cases.
enum class RankCheck { Enforce, AllowDependent };

struct NormalizationReport {
  std::vector<double> original_row_norms;
  std::vector<double> absorbed_weights;  // w_l * norm_l^2
};

class ProblemInstance;

inline constexpr double kRowNormTolerance = 1e-9;
inline constexpr double kRankRelativeThreshold = 1e-10;

std::pair<ProblemInstance, NormalizationReport> validate_and_normalize(
    const Matrix& raw_a, const Vector& w, double t = 1.0, RankCheck check = RankCheck::Enforce);

/// Instance JSON: {"A": [[...], ...], "w": [...], "t": 1.0}. Rows that are
/// already unit length within kRowNormTolerance are kept verbatim, so
/// save/load round-trips bit-for-bit.
ProblemInstance load_instance_json(std::string_view text);

/// n linear functions of d sensor parameters: unit-norm rows of A, positive
/// weights w and total time t. Immutable; built by validate_and_normalize or
/// load_instance only.
class ProblemInstance {
 public:
  const Matrix& A() const noexcept { return a_; }
  const Vector& w() const noexcept { return w_; }
  double t() const noexcept { return t_; }
  int n() const noexcept { return static_cast<int>(a_.rows()); }
  int d() const noexcept { return static_cast<int>(a_.cols()); }

  /// Sum of the weights; the local strategy's cost is weight_sum() / t^2.
  double weight_sum() const noexcept { return w_.sum(); }

  std::span<const double> row(int l) const noexcept {
    return {a_.data() + static_cast<std::ptrdiff_t>(l) * a_.cols(),
            static_cast<std::size_t>(a_.cols())};
  }

  /// Same functions and weights, different total time.
  ProblemInstance with_time(double t) const;

  friend bool operator==(const ProblemInstance& x, const ProblemInstance& y) {
    return x.t_ == y.t_ && x.a_ == y.a_ && x.w_ == y.w_;
  }

 private:
  ProblemInstance(Matrix a, Vector w, double t) : a_(std::move(a)), w_(std::move(w)), t_(t) {}

  friend std::pair<ProblemInstance, NormalizationReport> validate_and_normalize(
      const Matrix&, const Vector&, double, RankCheck);
  friend ProblemInstance load_instance_json(std::string_view);

  Matrix a_;
  Vector w_;
  double t_;
};

enum class Strategy { Local, Naive, OptSequential, SignedSensorSymmetric };

std::string_view to_string(Strategy s);

struct StrategyCost {
  Strategy strategy;
  double value;     // already multiplied by 1/t^2
  bool achievable;  // false only for the signed-sensor-symmetric bound with d > 2

  static StrategyCost make(Strategy s, double value, int d) {
    return {s, value, !(s == Strategy::SignedSensorSymmetric && d > 2)};
  }
};

ProblemInstance load_instance(const std::filesystem::path& path);
std::string instance_to_json(const ProblemInstance& inst);
void save_instance(const ProblemInstance& inst, const std::filesystem::path& path);

/// printf("%.17g") formatting used for every emitted double.
std::string format_double(double x);

}  // namespace qsn
