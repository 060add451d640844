#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qsn/copt.hpp"
#include "qsn/harness.hpp"
#include "qsn/protocols.hpp"

using namespace qsn;

namespace {

ProblemInstance random_instance(CounterRng& rng, int max_d = 9) {
  const int d = oracle::uniform_int(rng, 1, max_d);
  const int n = oracle::uniform_int(rng, 1, d);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (double& x : w) x = oracle::uniform(rng, 0.2, 4.0);
  return sample_instance(d, n, w, false, rng).with_time(oracle::uniform(rng, 0.5, 2.0));
}

}  // namespace

TEST(Local, IsTotalWeightOverTimeSquared) {
  Matrix a(2, 3);
  a << 1, 0, 0, 0, 0.6, 0.8;
  Vector w(2);
  w << 1.5, 2.5;
  const ProblemInstance inst = validate_and_normalize(a, w, 2.0).first;
  const StrategyCost c = local_cost(inst);
  EXPECT_EQ(c.strategy, Strategy::Local);
  EXPECT_DOUBLE_EQ(c.value, 1.0);
  EXPECT_TRUE(c.achievable);
}

TEST(Naive, OrthogonalPairLandmark) {
  const ProblemInstance inst = validate_and_normalize(Matrix::Identity(2, 2), Vector::Ones(2)).first;
  EXPECT_DOUBLE_EQ(naive_cost(inst).first.value, 8.0);
}

TEST(Naive, EqualWeightBoundsFormula) {
  const ProblemInstance inst = validate_and_normalize(Matrix::Identity(2, 8), Vector::Ones(2)).first;
  const NaiveBounds b = naive_equal_weight_bounds(inst);
  EXPECT_DOUBLE_EQ(b.lower, 1.0);
  EXPECT_DOUBLE_EQ(b.upper, 8.0);
  // Standard-basis rows are the worst case.
  EXPECT_DOUBLE_EQ(naive_cost(inst).first.value, b.upper);
}

TEST(Naive, AlignedRowsHitTheLowerBound) {
  const int d = 8;
  Matrix a = Matrix::Constant(2, d, 1.0);
  a(1, 3) = -1.0;  // still flat, so mu = 1/sqrt(d)
  const ProblemInstance inst = validate_and_normalize(a, Vector::Ones(2)).first;
  EXPECT_NEAR(naive_cost(inst).first.value, naive_equal_weight_bounds(inst).lower, 1e-12);
}

TEST(Naive, BoundsHoldOnRandomInstances) {
  CounterRng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = oracle::uniform_int(rng, 1, 10);
    const int n = oracle::uniform_int(rng, 1, d);
    const ProblemInstance inst =
        sample_instance(d, n, std::vector<double>(static_cast<std::size_t>(n), 1.3), false, rng);
    const NaiveBounds b = naive_equal_weight_bounds(inst);
    const double v = naive_cost(inst).first.value;
    EXPECT_LE(b.lower, v * (1 + 1e-12));
    EXPECT_LE(v, b.upper * (1 + 1e-12));
  }
}

TEST(Naive, UnequalWeightsHaveNoBounds) {
  Vector w(2);
  w << 1.0, 2.0;
  const ProblemInstance inst = validate_and_normalize(Matrix::Identity(2, 2), w).first;
  EXPECT_THROW(naive_equal_weight_bounds(inst), Error);
}

TEST(Naive, EqualsSequentialAtTheNormalizedIdentity) {
  CounterRng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const ProblemInstance inst = random_instance(rng);
    const double naive = naive_cost(inst).first.value;
    EXPECT_NEAR(sequential_cost_at(inst, normalized_identity(inst.w())).cost, naive, 1e-9 * naive);
  }
}

TEST(Mu, EntriesLieBetweenFlatAndSpiked) {
  CounterRng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const ProblemInstance inst = random_instance(rng);
    for (double mu : mu_vector(inst).mu) {
      EXPECT_GE(mu, 1.0 / std::sqrt(static_cast<double>(inst.d())) - 1e-15);
      EXPECT_LE(mu, 1.0 + 1e-15);
    }
  }
}

TEST(OptimalTimes, SumToTotalAndScaleAsCubeRoot) {
  const std::vector<double> k{1.0, 8.0, 27.0};
  const TimeAllocation a = optimal_times(k, 6.0);
  EXPECT_NEAR(a.times[0], 1.0, 1e-15);
  EXPECT_NEAR(a.times[1], 2.0, 1e-15);
  EXPECT_NEAR(a.times[2], 3.0, 1e-15);
  EXPECT_NEAR(a.cost, 216.0 / 36.0, 1e-13);
}

TEST(OptimalTimes, MatchesGoldenSectionForTwoFunctions) {
  CounterRng rng(34);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> k{oracle::uniform(rng, 0.01, 5.0), oracle::uniform(rng, 0.01, 5.0)};
    const double t = oracle::uniform(rng, 0.3, 3.0);
    const double numeric = oracle::golden_section_min(
        [&](double t1) { return oracle::allocation_cost(k, {t1, t - t1}); }, 1e-9 * t, t * (1 - 1e-9));
    const TimeAllocation a = optimal_times(k, t);
    EXPECT_NEAR(a.cost, numeric, 1e-10 * numeric);
    EXPECT_NEAR(a.times[0] + a.times[1], t, 1e-9);
  }
}

TEST(OptimalTimes, RejectsNonPositiveK) {
  EXPECT_THROW(optimal_times(std::vector<double>{1.0, 0.0}, 1.0), Error);
  EXPECT_THROW(optimal_times(std::vector<double>{1.0, -2.0}, 1.0), Error);
}

TEST(Sequential, RejectsColumnsOffTheWeightEllipsoid) {
  const ProblemInstance inst = validate_and_normalize(Matrix::Identity(2, 2), Vector::Ones(2)).first;
  try {
    sequential_cost_at(inst, BasisChange::from_matrix(2.0 * Eigen::MatrixXd::Identity(2, 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNormalized);
  }
}

TEST(Sequential, GeneralFormIsInvariantUnderColumnRescaling) {
  CounterRng rng(35);
  for (int trial = 0; trial < 200; ++trial) {
    const ProblemInstance inst = random_instance(rng, 6);
    const int n = inst.n();
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = oracle::uniform(rng, -1.0, 1.0);
    c += 2.0 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd scaled = c;
    for (int l = 0; l < n; ++l) scaled.col(l) *= oracle::uniform(rng, 0.1, 10.0) * (rng.uniform01() < 0.5 ? -1 : 1);
    const double ref = sequential_cost_general(inst, BasisChange::from_matrix(c));
    EXPECT_NEAR(sequential_cost_general(inst, BasisChange::from_matrix(scaled)), ref, 1e-10 * ref);
  }
}

TEST(Sequential, GeneralFormAgreesWithConstrainedFormOnTheEllipsoid) {
  CounterRng rng(36);
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemInstance inst = random_instance(rng, 6);
    const BasisChange c = normalized_identity(inst.w());
    EXPECT_NEAR(sequential_cost_general(inst, c), sequential_cost_at(inst, c).cost,
                1e-12 * sequential_cost_at(inst, c).cost);
  }
}

TEST(Sequential, FunctionsThatVanishGetNoTime) {
  // Two copies of (1,1)/sqrt 2: the saturating basis measures one sum and
  // a difference that is identically zero.
  Matrix a = Matrix::Constant(2, 2, 1.0 / std::sqrt(2.0));
  const ProblemInstance inst = validate_and_normalize(a, Vector::Ones(2), 1.0, RankCheck::AllowDependent).first;
  const SequentialEvaluation e = sequential_cost_at(inst, saturating_C(inst.w(), 0));
  EXPECT_NEAR(e.cost, 1.0, 1e-12);
  EXPECT_NEAR(e.times.times[0], 1.0, 1e-12);
  EXPECT_EQ(e.times.times[1], 0.0);
}

TEST(Scaling, CostsScaleAsInverseTimeSquared) {
  CounterRng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemInstance inst = random_instance(rng).with_time(1.0);
    const double local = local_cost(inst).value;
    const double naive = naive_cost(inst).first.value;
    for (double t : {0.5, 2.0}) {
      const ProblemInstance scaled = inst.with_time(t);
      EXPECT_NEAR(local_cost(scaled).value * t * t, local, 1e-12 * local);
      EXPECT_NEAR(naive_cost(scaled).first.value * t * t, naive, 1e-12 * naive);
    }
  }
}
