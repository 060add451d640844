#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "oracles.hpp"
#include "qsn/copt.hpp"
#include "qsn/harness.hpp"

using namespace qsn;

namespace {

SweepConfig small_config() {
  SweepConfig c;
  c.d_values = {2, 5};
  c.samples = 6;
  c.restarts = 4;
  c.seed = 7;
  return c;
}

std::string csv_of(const std::vector<SweepRecord>& records) {
  std::ostringstream out;
  write_sweep_csv(out, records);
  return out.str();
}

}  // namespace

TEST(Sampling, OrthantRowsAreNonNegativeUnitVectors) {
  CounterRng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemInstance inst = sample_instance(6, 3, std::vector<double>{1, 2, 3}, true, rng);
    EXPECT_GE(inst.A().minCoeff(), 0.0);
    for (int l = 0; l < 3; ++l) EXPECT_NEAR(inst.A().row(l).norm(), 1.0, 1e-12);
  }
}

TEST(Sampling, SameStreamSameInstance) {
  const CounterRng root(72);
  CounterRng a = root.split(5);
  CounterRng b = root.split(5);
  EXPECT_TRUE(sample_instance(4, 2, std::vector<double>{1, 1}, false, a) ==
              sample_instance(4, 2, std::vector<double>{1, 1}, false, b));
}

TEST(Sampling, RejectsBadShapes) {
  CounterRng rng(73);
  EXPECT_THROW(sample_instance(2, 3, std::vector<double>{1, 1, 1}, false, rng), Error);
  EXPECT_THROW(sample_instance(3, 2, std::vector<double>{1}, false, rng), Error);
}

TEST(NearDuplicate, RowsSitAtTheRequestedAngle) {
  CounterRng rng(74);
  const Vector a_bar = oracle::random_unit_rows(1, 9, rng).row(0).transpose();
  for (int n : {1, 2, 3, 5}) {
    const ProblemInstance inst = near_duplicate_instance(a_bar, n, 0.01, Vector::Ones(n), rng);
    for (int l = 0; l < n; ++l) EXPECT_NEAR(inst.A().row(l).dot(a_bar), std::cos(0.01), 1e-14);
    if (n > 1) EXPECT_NEAR(inst.A().colwise().sum().normalized().dot(a_bar.transpose()), 1.0, 1e-14);
  }
}

TEST(Example1, DirectionForKappaOne) {
  Vector expected(4);
  expected << 2, 1, 1, 1;
  expected /= std::sqrt(7.0);
  EXPECT_NEAR((example1_direction(4, 1, 2.0, 1.0) - expected).norm(), 0.0, 1e-15);
}

TEST(Example1, ParameterChecks) {
  EXPECT_THROW(reproduce_example1({16}, 1.0, 2.0, 0.5, 1e-3), Error);
  EXPECT_THROW(reproduce_example1({16}, 2.0, 1.0, -0.5, 1e-3), Error);  // kappa would be 0
  EXPECT_THROW(reproduce_example1({16}, 2.0, 1.0, 0.99, 1e-3), Error);  // kappa would be d
  EXPECT_THROW(reproduce_example1({}, 2.0, 1.0, 0.5, 1e-3), Error);
}

TEST(Example1, RatioGrowsWithD) {
  std::vector<Example1Row> rows;
  const Report r = reproduce_example1({16, 64}, 2.0, 1.0, 0.5, 1e-3, &rows, 8);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].kappa, 4);
  EXPECT_EQ(rows[1].kappa, 8);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(rows[1].ratio, rows[0].ratio);
}

TEST(Example2, Reproduces) { EXPECT_TRUE(reproduce_example2().passed()); }

TEST(SweepConfig, Validation) {
  SweepConfig c = small_config();
  EXPECT_NO_THROW(validate(c));
  c.samples = 0;
  EXPECT_THROW(validate(c), Error);
  c = small_config();
  c.n = 3;
  c.weights = {1, 1, 1};
  EXPECT_THROW(validate(c), Error);  // d = 2 < n
  c = small_config();
  c.weights = {1};
  EXPECT_THROW(validate(c), Error);
}

TEST(Sweep, OutputIsDeterministic) {
  const SweepConfig c = small_config();
  const std::string first = csv_of(run_sweep(c));
  EXPECT_EQ(first, csv_of(run_sweep(c)));
  EXPECT_EQ(first.find('\r'), std::string::npos);
}

TEST(Sweep, RecordsAreSortedAndSatisfyDominance) {
  const std::vector<SweepRecord> records = run_sweep(small_config());
  ASSERT_EQ(records.size(), 12u);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SweepRecord& r = records[i];
    EXPECT_EQ(r.instance_id, static_cast<int>(i));
    EXPECT_LE(r.m_opt, r.m_naive + 1e-9);
    EXPECT_LE(r.m_ss, r.m_local + 1e-9);
    ASSERT_TRUE(r.alpha_dot.has_value());
  }
}

TEST(Sweep, CsvLayout) {
  SweepConfig c = small_config();
  c.n = 3;
  c.d_values = {4};
  c.weights = {1, 1, 1};
  c.samples = 2;
  const std::string csv = csv_of(run_sweep(c));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "instance_id,d,n,G_opt_omega,M_local,M_naive,M_ss,M_opt,alpha_dot");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.back(), ',');  // alpha_dot is empty for n != 2
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
  }
  EXPECT_EQ(rows, 2);
}

TEST(Fig4, EmitsOnePointPerSample) {
  std::vector<Fig4Point> points;
  reproduce_fig4(10, 3, &points, 4);
  EXPECT_EQ(points.size(), 10u);
  std::ostringstream out;
  write_fig4_csv(out, points);
  const std::string csv = out.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
}

TEST(Report, JsonShape) {
  Report r{"demo", {{"a", 1.0, 1.0, 0.1, true}, {"b", 2.0, 3.0, 0.5, false}}, {"note \"quoted\""}};
  const auto doc = nlohmann::json::parse(r.to_json());
  ASSERT_EQ(doc["checks"].size(), 2u);
  EXPECT_EQ(doc["checks"][1]["name"], "b");
  EXPECT_EQ(doc["checks"][1]["expected"], 2.0);
  EXPECT_EQ(doc["checks"][1]["actual"], 3.0);
  EXPECT_EQ(doc["checks"][1]["tol"], 0.5);
  EXPECT_EQ(doc["checks"][1]["pass"], false);
  EXPECT_EQ(doc["pass"], false);
  EXPECT_FALSE(r.passed());
}
