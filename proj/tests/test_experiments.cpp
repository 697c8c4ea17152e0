#include "mlmmsb/experiments.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mlmmsb;

namespace {

ExperimentConfig tiny(int threads = 1) {
  ExperimentConfig cfg;
  cfg.name = "tiny";
  cfg.axis = SweepAxis::Rho;
  cfg.n = 60;
  cfg.L = 4;
  cfg.n0 = 10;
  cfg.values = {0.2, 0.5};
  cfg.repetitions = 3;
  cfg.base_seed = 42;
  cfg.threads = threads;
  return cfg;
}

ExperimentResult synthetic(SweepAxis axis, const std::vector<double>& x, const std::vector<double>& y) {
  ExperimentResult r;
  r.config.axis = axis;
  r.config.values = x;
  r.config.methods = {Method::SPDSoS};
  for (std::size_t i = 0; i < x.size(); ++i) {
    CellResult c;
    c.method = Method::SPDSoS;
    c.value = x[i];
    c.successes = 1;
    c.hamming_mean = y[i];
    r.cells.push_back(c);
  }
  return r;
}

}  // namespace

TEST(Presets, FullAndScaledGrids) {
  const auto e1 = preset_config("exp1");
  EXPECT_EQ(e1.n, 500);
  EXPECT_EQ(e1.L, 100);
  EXPECT_EQ(e1.n0, 100);
  EXPECT_EQ(e1.repetitions, 100);
  EXPECT_EQ(e1.values.front(), 0.02);
  EXPECT_EQ(e1.values.back(), 0.2);
  const auto e3 = preset_config("exp3");
  EXPECT_EQ(grid_point(e3, 2000).n0, 500);
  EXPECT_EQ(grid_point(e3, 200).n0, 50);
  const auto s1 = preset_config("exp1-scaled");
  EXPECT_EQ(s1.n, 200);
  EXPECT_EQ(s1.L, 30);
  EXPECT_EQ(s1.n0, 50);
  EXPECT_EQ(s1.repetitions, 20);
  EXPECT_EQ(s1.values, (std::vector<double>{0.02, 0.06, 0.10, 0.14, 0.18}));
  const auto s2 = preset_config("exp2-scaled");
  EXPECT_EQ(s2.n, 300);
  EXPECT_EQ(s2.rho, 0.2);
  EXPECT_EQ(s2.values, (std::vector<double>{8, 16, 32, 64}));
  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset_config(name).validate()) << name;
  EXPECT_THROW(preset_config("exp9"), ConfigError);
}

TEST(Config, Validation) {
  auto cfg = tiny();
  cfg.values = {0.5, 0.2};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = tiny();
  cfg.values = {1.5};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = tiny();
  cfg.n0 = 30;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = tiny();
  cfg.repetitions = 0;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  EXPECT_EQ(parse_axis("n0"), SweepAxis::N0);
  EXPECT_THROW(parse_axis("K"), ConfigError);
}

TEST(Run, MinimalRun) {
  auto cfg = tiny();
  cfg.values = {0.3};
  cfg.repetitions = 1;
  cfg.methods = {Method::SPSum};
  const auto result = run_experiment(cfg);
  ASSERT_EQ(result.cells.size(), 1u);
  ASSERT_EQ(result.cells[0].raw.size(), 1u);
  EXPECT_EQ(result.cells[0].successes, 1);
  EXPECT_EQ(result.cells[0].hamming_mean, result.cells[0].raw[0].hamming);
  EXPECT_EQ(result.cells[0].hamming_se, 0.0);
  EXPECT_EQ(result.cells[0].raw[0].seed, repetition_seed(42, 0, 0));
}

TEST(Run, DeterministicAcrossThreadCounts) {
  const auto a = run_experiment(tiny(1));
  const auto b = run_experiment(tiny(1));
  const auto c = run_experiment(tiny(3));
  ASSERT_EQ(a.cells.size(), 6u);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    for (const auto* other : {&b, &c}) {
      const auto& x = a.cells[i];
      const auto& y = other->cells[i];
      EXPECT_EQ(x.method, y.method);
      EXPECT_EQ(x.hamming_mean, y.hamming_mean);
      EXPECT_EQ(x.hamming_se, y.hamming_se);
      EXPECT_EQ(x.relative_mean, y.relative_mean);
      for (std::size_t r = 0; r < x.raw.size(); ++r) {
        EXPECT_EQ(x.raw[r].hamming, y.raw[r].hamming);
        EXPECT_EQ(x.raw[r].seed, y.raw[r].seed);
      }
    }
  }
  EXPECT_NE(run_experiment([] { auto cfg = tiny(); cfg.base_seed = 43; return cfg; }()).cells[0].hamming_mean,
            a.cells[0].hamming_mean);
}

TEST(Run, MeansAndStandardErrors) {
  const auto result = run_experiment(tiny(2));
  for (const auto& cell : result.cells) {
    std::vector<double> h;
    for (const auto& r : cell.raw) h.push_back(r.hamming);
    double mean = 0.0;
    for (double v : h) mean += v;
    mean /= static_cast<double>(h.size());
    double ss = 0.0;
    for (double v : h) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(cell.hamming_mean, mean, 1e-14);
    EXPECT_NEAR(cell.hamming_se, std::sqrt(ss / static_cast<double>(h.size() - 1) / static_cast<double>(h.size())), 1e-14);
  }
  EXPECT_EQ(result.series(Method::SPSoS).size(), 2u);
  EXPECT_EQ(&result.cell(Method::SPSoS, 0.5), result.series(Method::SPSoS)[1]);
  EXPECT_THROW(result.cell(Method::SPSoS, 0.7), ConfigError);
}

TEST(Run, ScaledExperimentOneTrend) {
  auto cfg = preset_config("exp1-scaled");
  cfg.values = {0.02, 0.2};
  cfg.repetitions = 10;
  cfg.methods = {Method::SPDSoS};
  const auto result = run_experiment(cfg);
  EXPECT_LT(result.cell(Method::SPDSoS, 0.2).hamming_mean, result.cell(Method::SPDSoS, 0.02).hamming_mean);
}

TEST(Diagnostics, ZeroNetwork) {
  const auto pi = generate_membership(20, 3, 2, 1);
  const auto conn = generate_connectivity(3, 3, 2, 0.0);
  const auto d = compute_diagnostics(sample_mlmmsb(pi, conn, 3), expected_adjacency(pi, conn), 0.0, 20, 3);
  EXPECT_EQ(d.tau, 0.0);
  EXPECT_EQ(d.tau_tilde, 0.0);
  EXPECT_TRUE(d.assumption1_holds);
  EXPECT_TRUE(d.assumption3_holds);
}

TEST(Diagnostics, NoDeviationWhenSampleEqualsExpectation) {
  MatrixXd rows = MatrixXd::Zero(6, 2);
  rows.topRows(3).col(0).setOnes();
  rows.bottomRows(3).col(1).setOnes();
  const MembershipMatrix pi(rows);
  const ConnectivityStack conn({MatrixXd::Identity(2, 2)}, 1.0);
  const auto net = sample_mlmmsb(pi, conn, 1);
  const auto d = compute_diagnostics(net, expected_adjacency(pi, conn), 1.0, 6, 1);
  EXPECT_EQ(d.tau, 0.0);
  EXPECT_EQ(d.tau_tilde, 0.0);
}

TEST(Diagnostics, BruteForceTau) {
  const auto pi = generate_membership(50, 3, 5, 8);
  const auto conn = generate_connectivity(3, 10, 9, 0.3);
  const auto net = sample_mlmmsb(pi, conn, 10);
  const auto omega = expected_adjacency(pi, conn);
  double tau = 0.0, tau_tilde = 0.0;
  for (Index i = 0; i < 50; ++i) {
    for (Index j = 0; j < 50; ++j) {
      double s = 0.0, s2 = 0.0;
      for (Index l = 0; l < 10; ++l) {
        const MatrixXd a(net.layer(l));
        const MatrixXd& w = omega.layers[static_cast<std::size_t>(l)];
        s += a(i, j) - w(i, j);
        for (Index m = 0; m < 50; ++m) s2 += a(i, m) * a(m, j) - w(i, m) * w(m, j);
      }
      tau = std::max(tau, std::abs(s));
      tau_tilde = std::max(tau_tilde, std::abs(s2));
    }
  }
  const auto d = compute_diagnostics(net, omega, 0.3, 50, 10);
  EXPECT_EQ(d.tau, tau);
  EXPECT_NEAR(d.tau_tilde, tau_tilde, 1e-9);
  EXPECT_EQ(d.assumption1_holds, 0.3 * 50 * 10 >= tau * tau * std::log(60.0));
  EXPECT_THROW(compute_diagnostics(net, omega, 0.3, 51, 10), DimensionError);
}

TEST(Slope, PlantedPowerLawAndConstant) {
  const std::vector<double> x{8, 16, 32, 64, 128};
  std::vector<double> y, flat(5, 0.3);
  for (double v : x) y.push_back(2.5 * std::pow(v, -0.5));
  EXPECT_NEAR(log_log_slope(x, y), -0.5, 1e-9);
  EXPECT_NEAR(log_log_slope(x, flat), 0.0, 1e-12);
  EXPECT_NEAR(rate_slope_check(synthetic(SweepAxis::L, x, y), SweepAxis::L, Method::SPDSoS), -0.5, 1e-9);
}

TEST(Slope, Errors) {
  const std::vector<double> x{1, 2, 3, 4};
  EXPECT_THROW(rate_slope_check(synthetic(SweepAxis::L, x, {0.1, 0.0, 0.1, 0.1}), SweepAxis::L, Method::SPDSoS),
               UnusableDataError);
  EXPECT_THROW(rate_slope_check(synthetic(SweepAxis::L, {1, 2, 3}, {0.1, 0.1, 0.1}), SweepAxis::L, Method::SPDSoS),
               UnusableDataError);
  EXPECT_THROW(rate_slope_check(synthetic(SweepAxis::L, x, {0.4, 0.3, 0.2, 0.1}), SweepAxis::Rho, Method::SPDSoS),
               ConfigError);
}

TEST(Spearman, Ranks) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(spearman_correlation(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0);
  EXPECT_DOUBLE_EQ(spearman_correlation(x, std::vector<double>{1, 4, 9, 16, 25}), 1.0);
  // Ties get average ranks: y ranks (1.5, 1.5, 3, 4, 5).
  const double r = spearman_correlation(x, std::vector<double>{1, 1, 2, 3, 4});
  EXPECT_NEAR(r, 9.5 / std::sqrt(10.0 * 9.5), 1e-12);
}
