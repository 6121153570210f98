#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gphase/experiments.hpp"

using namespace gphase;

namespace {

NoiseConfig noise(const std::string& axes, double db, double dt) {
  NoiseConfig c;
  c.axes[0] = NoiseAxes::parse(axes);
  c.db_max = db;
  c.dt = dt;
  return c;
}

McOptions options(int n, std::uint64_t seed = 1) {
  McOptions o;
  o.realizations = n;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(Predictions, FormulaExamples) {
  // Hand arithmetic: sqrt(pi^3/6) * 0.1 / sqrt(300) and sqrt(pi/6) * pi * 0.1 / sqrt(300).
  EXPECT_NEAR(predict_aa(1.0, 1.0, 0.1, 300), 2.27326 * 0.1 / 17.32051, 1e-5);
  EXPECT_NEAR(predict_aa(1.0, 1.0, 0.1, 300), 0.01312, 5e-6);
  EXPECT_NEAR(predict_dynamic(kPi, 1.0, 0.1, 300), 0.01312, 5e-6);
  EXPECT_NEAR(predict_berry(0.01, 100, 1000, 100, 1000), 0.05827, 5e-6);
  EXPECT_NEAR(4 / std::sqrt(3 * kPi), 1.3029, 1e-4);
  EXPECT_EQ(predict_aa(1.2, 3.0, 0.0, 100), 0.0);
  EXPECT_EQ(predict_dynamic(1.0, 5.4, 0.0, 100), 0.0);
  EXPECT_THROW(predict_aa(0.0, 1.0, 0.1, 10), std::invalid_argument);
  EXPECT_THROW(predict_dynamic(1.0, 1.0, 0.1, 0), std::invalid_argument);
}

TEST(Predictions, ThetaBound) {
  EXPECT_DOUBLE_EQ(theta_bound(1, 1, 1), 2 * kPi);
  EXPECT_DOUBLE_EQ(theta_bound(3.3, 3.3, 3.3), 2 * kPi);
  EXPECT_NEAR(theta_bound(1, 2, 1), 1.5 * kPi, 1e-15);
  EXPECT_LT(theta_bound(1, 1e6, 1e6), 1e-5);
  EXPECT_THROW(theta_bound(1, 0, 1), std::invalid_argument);
  // Where the two predictions cross at a shared step length.
  const double bz = 2.0, bx = 1.5, bn = 3.0, dt = 1e-3, db = 0.05;
  const double tb = theta_bound(bz, bx, bn);
  const double nx = 0.5 * kPi / bx / dt;
  const double nz = tb / bz / dt;
  EXPECT_NEAR(predict_aa(bx, bn, db, nx), predict_dynamic(tb, bz, db, nz), 1e-12);
}

TEST(MonteCarlo, AaMatchesPredictionAtMatchedFields) {
  const FieldAssignment f = FieldAssignment::matched(1.0);
  const NoiseConfig c = noise("xz", 0.1, 0.5 * kPi / 300);
  const MonteCarloResult r = mc_distance_aa(kPi, c, f, options(20000));
  EXPECT_EQ(aa_rx_steps(kPi, c, f, {}), 300);
  EXPECT_EQ(r.steps_per_realization, 1200);
  EXPECT_NEAR(r.prediction, 0.01312, 5e-6);
  EXPECT_LT(r.rel_err, 0.05) << r.mean_d;
  EXPECT_EQ(r.n, 20000);
  EXPECT_EQ(r.samples.size(), 20000u);
}

TEST(MonteCarlo, DynamicMatchesPrediction) {
  FieldAssignment f;
  f.b_z = 1.0;
  const NoiseConfig c = noise("xz", 0.1, kPi / 300);
  const MonteCarloResult r = mc_distance_dynamic(kPi, c, f, options(20000));
  EXPECT_EQ(r.steps_per_realization, 300);
  EXPECT_LT(r.rel_err, 0.05) << r.mean_d;
}

TEST(MonteCarlo, DynamicScalesAsSquareRootOfAngle) {
  FieldAssignment f;
  const NoiseConfig c = noise("xz", 0.1 * 5.4, 1.0 / 1620);
  McOptions o = options(1500);
  const MonteCarloResult big = mc_distance_dynamic(2 * kPi, c, f, o);
  o.cell_index = 1;
  const MonteCarloResult small = mc_distance_dynamic(kPi / 2, c, f, o);
  const double ratio = big.mean_d / small.mean_d;
  const double sigma = ratio * std::hypot(big.std_err / big.mean_d, small.std_err / small.mean_d);
  EXPECT_NEAR(ratio, 2.0, 3 * sigma);
}

TEST(MonteCarlo, StandardErrorShrinksWithRealizations) {
  FieldAssignment f;
  const NoiseConfig c = noise("xz", 0.1 * 5.4, 1.0 / 1620);
  const MonteCarloResult a = mc_distance_dynamic(kPi, c, f, options(150, 3));
  const MonteCarloResult b = mc_distance_dynamic(kPi, c, f, options(600, 4));
  EXPECT_NEAR(a.std_err / b.std_err, 2.0, 0.4);
  // The common prefix of the sample sequence does not depend on the count.
  const MonteCarloResult c150 = mc_distance_dynamic(kPi, c, f, options(150, 4));
  for (int i = 0; i < 150; ++i) EXPECT_EQ(c150.samples[i], b.samples[i]);
}

TEST(MonteCarlo, ZeroAmplitude) {
  FieldAssignment f;
  const MonteCarloResult r = mc_distance_aa(1.0, noise("xz", 0.0, 1e-3), f, options(5));
  EXPECT_LT(r.mean_d, 1e-10);
  EXPECT_EQ(r.prediction, 0.0);
  EXPECT_EQ(r.rel_err, 0.0);
}

TEST(MonteCarlo, WorkerCountDoesNotChangeSamples) {
  FieldAssignment f;
  const NoiseConfig c = noise("xz", 0.3, 1.0 / 1620);
  McOptions one = options(40, 9), four = options(40, 9);
  four.workers = 4;
  const MonteCarloResult a = mc_distance_aa(2.0, c, f, one);
  const MonteCarloResult b = mc_distance_aa(2.0, c, f, four);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.mean_d, b.mean_d);
}

TEST(MonteCarlo, RecordsRealizationZeroPath) {
  FieldAssignment f;
  McOptions o = options(3, 2);
  o.record_from = State::basis(2, 0);
  const MonteCarloResult r = mc_distance_aa(1.0, noise("xz", 0.2, 1e-2), f, o);
  ASSERT_FALSE(r.sample_path.empty());
  EXPECT_NEAR(r.sample_path.front().bz, 1.0, 1e-15);
  EXPECT_NEAR(r.sample_path.back().bz, 1.0, 0.1);
}

TEST(Berry, MonteCarloMatchesPrediction) {
  BerryParams bp;
  const NoiseModel m = berry_noise_model(bp, noise("xyz", 0.01, 1.0));
  ASSERT_EQ(m.channels.size(), 2u);
  EXPECT_NEAR(m.channel(kBerryTiltChannel).dt, 0.1, 1e-15);
  const MonteCarloResult r = mc_distance_berry(bp, m, options(600));
  EXPECT_NEAR(r.prediction, 0.05827, 5e-6);
  EXPECT_LT(r.rel_err, 0.05) << r.mean_d;
  EXPECT_NEAR(r.theta, berry_phase_ideal(kPi / 4), 1e-12);
}

TEST(Berry, WorseThanDynamicEquivalent) {
  BerryParams bp;
  const NoiseConfig base = noise("xyz", 0.01, 1.0);
  const MonteCarloResult berry = mc_distance_berry(bp, berry_noise_model(bp, base), options(300, 5));
  const MonteCarloResult dyn = mc_distance_berry_dynamic_equivalent(bp, base, options(300, 6));
  EXPECT_EQ(dyn.gate, MeasuredGate::kDynamic);
  const WelchInterval w = welch_interval(berry, dyn);
  EXPECT_GT(w.low, 0.0);
}

TEST(Welch, IntervalArithmetic) {
  MonteCarloResult a, b;
  a.n = b.n = 11;
  a.mean_d = 1.0;
  b.mean_d = 0.5;
  a.std_err = b.std_err = 0.1;
  const WelchInterval w = welch_interval(a, b);
  EXPECT_NEAR(w.difference, 0.5, 1e-15);
  EXPECT_NEAR(w.dof, 20.0, 1e-12);
  EXPECT_NEAR(w.combined_stderr, 0.1 * std::sqrt(2.0), 1e-15);
  // Student t, 20 degrees of freedom, 97.5% quantile (table value).
  EXPECT_NEAR(w.high - w.difference, 2.085963 * w.combined_stderr, 1e-6);
  EXPECT_NEAR(w.difference - w.low, 2.085963 * w.combined_stderr, 1e-6);

  b.std_err = 0.0;
  a.n = 1001;
  a.std_err = 0.01;
  const WelchInterval big = welch_interval(a, b);
  EXPECT_NEAR(big.dof, 1000.0, 1e-9);
  EXPECT_NEAR(big.high - big.difference, 1.962339 * 0.01, 1e-6);
}

TEST(PowerLaw, ExactFit) {
  const std::vector<double> x = {0.5, 1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::sqrt(v));
  const PowerLawFit f = fit_power_law(x, y);
  EXPECT_NEAR(f.exponent, 0.5, 1e-12);
  EXPECT_NEAR(f.prefactor, 3.0, 1e-12);
  EXPECT_THROW(fit_power_law({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(fit_power_law({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(fit_power_law({1.0, -1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(Sweep, GridLayoutAndCsv) {
  SweepGrid g;
  g.theta_values = {kPi / 2, kPi};
  g.db_values = {0.02, 0.1};
  g.realizations = 20;
  g.noise = noise("xz", 0.0, 1.0 / 1620);
  FieldAssignment f;
  const auto rows = run_sweep(g, MeasuredGate::kDynamic, f, BerryParams{}, 7, 1);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_NEAR(rows[1].theta, kPi / 2, 1e-15);
  EXPECT_NEAR(rows[1].db_max, 0.1 * 5.4, 1e-15);
  EXPECT_NEAR(rows[2].theta, kPi, 1e-15);

  std::ostringstream os;
  write_csv(os, rows, {{"seed", "7"}});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "#@ seed = 7");
  std::getline(in, line);
  EXPECT_EQ(line, "gate_kind,theta,db_max,n_real,mean_D,stderr,prediction,rel_err,seed");
  int count = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("dynamic,", 0), 0u);
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
    ++count;
  }
  EXPECT_EQ(count, 4);

  EXPECT_EQ(csv_columns(true).size(), 14u);
  g.db_values.clear();
  EXPECT_THROW(run_sweep(g, MeasuredGate::kAa, f, BerryParams{}, 7, 1), std::invalid_argument);
}

TEST(Sweep, BerryRowsCarryLoopParameters) {
  SweepGrid g;
  g.db_values = {0.01, 0.02};
  g.realizations = 4;
  g.noise = noise("xyz", 0.0, 1.0);
  BerryParams bp;
  bp.n_tilt = bp.n_sweep = 100;
  const auto rows = run_sweep(g, MeasuredGate::kBerry, FieldAssignment{}, bp, 3, 2);
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_TRUE(rows[0].berry.has_value());
  std::ostringstream os;
  write_csv(os, rows, {});
  EXPECT_NE(os.str().find("t_tilt,t_sweep,n_tilt,n_sweep,theta_cone"), std::string::npos);
  EXPECT_EQ(parse_measured_gate("berry"), MeasuredGate::kBerry);
  EXPECT_THROW(parse_measured_gate("nope"), std::invalid_argument);
}
