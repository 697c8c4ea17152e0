#ifndef MLMMSB_EXPERIMENTS_HPP
#define MLMMSB_EXPERIMENTS_HPP

#include "mlmmsb/common.hpp"
#include "mlmmsb/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlmmsb {

enum class SweepAxis { Rho, L, N, N0 };

std::string_view axis_name(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);

/// One simulation study: a grid over a single parameter with the others
/// held fixed. Every repetition draws a fresh membership matrix, a fresh
/// connectivity stack and a fresh network.
struct ExperimentConfig {
  std::string name = "custom";
  SweepAxis axis = SweepAxis::Rho;
  Index n = 500;
  Index L = 100;
  Index n0 = 100;
  Index K = 3;
  double rho = 0.1;
  /// When positive, n0 = round(n0_fraction * n) at every grid point.
  double n0_fraction = 0.0;
  std::vector<double> values;
  int repetitions = 100;
  std::uint64_t base_seed = 1;
  std::vector<Method> methods{Method::SPSum, Method::SPDSoS, Method::SPSoS};
  int threads = 1;
  bool allow_self_loops = true;

  /// Throws ConfigError on any invalid combination.
  void validate() const;
};

/// Parameters of one grid point after the sweep value is applied.
struct GridPoint {
  Index n, L, n0, K;
  double rho;
};

GridPoint grid_point(const ExperimentConfig& cfg, double value);

/// Full-size presets exp1..exp4 and desk-scale variants exp1-scaled..exp4-scaled.
ExperimentConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

struct RepetitionRecord {
  int repetition = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  double hamming = 0.0;
  double relative = 0.0;
  std::string error;
};

struct CellResult {
  Method method;
  double value;
  int successes = 0;
  double hamming_mean = 0.0;
  double hamming_se = 0.0;
  double relative_mean = 0.0;
  double relative_se = 0.0;
  std::vector<RepetitionRecord> raw;
};

struct ExperimentResult {
  ExperimentConfig config;
  /// Ordered by method (config order), then sweep value.
  std::vector<CellResult> cells;

  const CellResult& cell(Method method, double value) const;
  std::vector<const CellResult*> series(Method method) const;
};

/// Seed of repetition r at grid index s; independent of execution order.
std::uint64_t repetition_seed(std::uint64_t base_seed, std::size_t sweep_index, int repetition);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct AssumptionDiagnostics {
  double tau = 0.0;
  double tau_tilde = 0.0;
  bool assumption1_holds = false;  ///< rho n L >= tau^2 log(n + L)
  bool assumption3_holds = false;  ///< rho^2 n^2 L >= tau_tilde^2 log(n + L)
};

/// tau = max_ij |sum_l (A_l - Omega_l)(i,j)|,
/// tau_tilde = max_ij |sum_l (A_l^2 - Omega_l^2)(i,j)| (all j, diagonal included).
AssumptionDiagnostics compute_diagnostics(const MultiLayerNetwork& net, const ExpectationStack& omega, double rho,
                                          Index n, Index L);

/// Ordinary least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Slope of log(mean Hamming error) against log(sweep value) for one method.
double rate_slope_check(const ExperimentResult& result, SweepAxis axis, Method method);

/// Spearman rank correlation (average ranks on ties).
double spearman_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace mlmmsb

#endif  // MLMMSB_EXPERIMENTS_HPP
