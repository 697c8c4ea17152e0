#include "mlmmsb/experiments.hpp"

#include "mlmmsb/estimators.hpp"
#include "mlmmsb/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace mlmmsb {

std::string_view axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Rho: return "rho";
    case SweepAxis::L: return "L";
    case SweepAxis::N: return "n";
    case SweepAxis::N0: return "n0";
  }
  return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::Rho, SweepAxis::L, SweepAxis::N, SweepAxis::N0}) {
    if (name == axis_name(a)) return a;
  }
  throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected rho, L, n or n0)");
}

GridPoint grid_point(const ExperimentConfig& cfg, double value) {
  GridPoint p{cfg.n, cfg.L, cfg.n0, cfg.K, cfg.rho};
  switch (cfg.axis) {
    case SweepAxis::Rho: p.rho = value; break;
    case SweepAxis::L: p.L = static_cast<Index>(std::llround(value)); break;
    case SweepAxis::N: p.n = static_cast<Index>(std::llround(value)); break;
    case SweepAxis::N0: p.n0 = static_cast<Index>(std::llround(value)); break;
  }
  if (cfg.n0_fraction > 0.0) p.n0 = static_cast<Index>(std::llround(cfg.n0_fraction * static_cast<double>(p.n)));
  return p;
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (values.empty()) throw ConfigError("sweep values must not be empty");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) throw ConfigError("sweep values must be strictly increasing");
  }
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (K < 1 || K > kMaxPermutationK) throw ConfigError("K must lie in 1..8");
  if (n0_fraction < 0.0 || n0_fraction > 1.0) throw ConfigError("n0_fraction must lie in [0,1]");
  for (double v : values) {
    const GridPoint p = grid_point(*this, v);
    if (!(p.rho >= 0.0 && p.rho <= 1.0)) throw ConfigError("rho must lie in [0,1]");
    if (p.L < 1) throw ConfigError("L must be at least 1");
    if (p.n < p.K) throw ConfigError("n must be at least K");
    if (p.n0 < 0 || p.K * p.n0 > p.n) throw ConfigError("K*n0 must not exceed n");
  }
}

namespace {

std::vector<double> arithmetic(double first, double step, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(std::round((first + step * i) * 1e9) / 1e9);
  return out;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"exp1", "exp2", "exp3", "exp4", "exp1-scaled", "exp2-scaled", "exp3-scaled", "exp4-scaled"};
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig cfg;
  cfg.name = std::string(name);
  cfg.K = 3;
  if (name == "exp1") {
    cfg.axis = SweepAxis::Rho;
    cfg.n = 500, cfg.L = 100, cfg.n0 = 100;
    cfg.values = arithmetic(0.02, 0.02, 10);
  } else if (name == "exp2") {
    cfg.axis = SweepAxis::L;
    cfg.n = 500, cfg.rho = 0.1, cfg.n0 = 100;
    cfg.values = arithmetic(10, 10, 10);
  } else if (name == "exp3") {
    cfg.axis = SweepAxis::N;
    cfg.L = 40, cfg.rho = 0.1, cfg.n0_fraction = 0.25;
    cfg.values = arithmetic(200, 200, 10);
  } else if (name == "exp4") {
    cfg.axis = SweepAxis::N0;
    cfg.n = 600, cfg.L = 50, cfg.rho = 0.1;
    cfg.values = arithmetic(20, 20, 10);
  } else if (name == "exp1-scaled") {
    cfg.axis = SweepAxis::Rho;
    cfg.n = 200, cfg.L = 30, cfg.n0 = 50;
    cfg.values = arithmetic(0.02, 0.04, 5);
    cfg.repetitions = 20;
  } else if (name == "exp2-scaled") {
    cfg.axis = SweepAxis::L;
    cfg.n = 300, cfg.rho = 0.2, cfg.n0 = 60;
    cfg.values = {8, 16, 32, 64};
    cfg.repetitions = 20;
  } else if (name == "exp3-scaled") {
    cfg.axis = SweepAxis::N;
    cfg.L = 20, cfg.rho = 0.1, cfg.n0_fraction = 0.25;
    cfg.values = {100, 200, 300, 400};
    cfg.repetitions = 10;
  } else if (name == "exp4-scaled") {
    cfg.axis = SweepAxis::N0;
    cfg.n = 240, cfg.L = 20, cfg.rho = 0.1;
    cfg.values = {10, 20, 40, 60, 80};
    cfg.repetitions = 10;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return cfg;
}

const CellResult& ExperimentResult::cell(Method method, double value) const {
  for (const auto& c : cells) {
    if (c.method == method && c.value == value) return c;
  }
  throw ConfigError("no result for method " + std::string(method_name(method)) + " at " + std::to_string(value));
}

std::vector<const CellResult*> ExperimentResult::series(Method method) const {
  std::vector<const CellResult*> out;
  for (const auto& c : cells) {
    if (c.method == method) out.push_back(&c);
  }
  return out;
}

std::uint64_t repetition_seed(std::uint64_t base_seed, std::size_t sweep_index, int repetition) {
  return derive_seed(base_seed, static_cast<std::uint64_t>(sweep_index), static_cast<std::uint64_t>(repetition));
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return {std::nan(""), std::nan("")};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double count = static_cast<double>(xs.size());
  out.mean = sum / count;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  }
  return out;
}

// One repetition: every method sees the same sampled network.
std::vector<RepetitionRecord> run_repetition(const ExperimentConfig& cfg, const GridPoint& p, std::uint64_t seed,
                                             int rep) {
  const MembershipMatrix pi = generate_membership(p.n, p.K, p.n0, derive_seed(seed, 1));
  const ConnectivityStack conn = generate_connectivity(p.K, p.L, derive_seed(seed, 2), p.rho);
  const MultiLayerNetwork net =
      sample_mlmmsb(pi, conn, derive_seed(seed, 3), SampleOptions{cfg.allow_self_loops});
  std::vector<RepetitionRecord> out;
  for (Method m : cfg.methods) {
    RepetitionRecord rec;
    rec.repetition = rep;
    rec.seed = seed;
    try {
      const EstimationResult fit = estimate(net, m, p.K);
      const ErrorReport err = compare_memberships(fit.pi_hat, pi);
      rec.hamming = err.hamming;
      rec.relative = err.relative;
    } catch (const Error& e) {
      rec.ok = false;
      rec.hamming = rec.relative = std::nan("");
      rec.error = std::string(e.kind()) + ": " + e.what();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t points = cfg.values.size();
  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  const std::size_t tasks = points * reps;

  // slots[task] holds one record per method; filled by index, not by
  // completion order.
  std::vector<std::vector<RepetitionRecord>> slots(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t s = t / reps;
      const int r = static_cast<int>(t % reps);
      try {
        slots[t] = run_repetition(cfg, grid_point(cfg, cfg.values[s]), repetition_seed(cfg.base_seed, s, r), r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto thread_count = static_cast<std::size_t>(std::min<std::size_t>(cfg.threads, tasks));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.config = cfg;
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    for (std::size_t s = 0; s < points; ++s) {
      CellResult cell;
      cell.method = cfg.methods[mi];
      cell.value = cfg.values[s];
      std::vector<double> ham;
      std::vector<double> rel;
      for (std::size_t r = 0; r < reps; ++r) {
        const RepetitionRecord& rec = slots[s * reps + r][mi];
        cell.raw.push_back(rec);
        if (rec.ok) {
          ham.push_back(rec.hamming);
          rel.push_back(rec.relative);
        }
      }
      cell.successes = static_cast<int>(ham.size());
      const MeanSe h = mean_and_se(ham);
      const MeanSe e = mean_and_se(rel);
      cell.hamming_mean = h.mean, cell.hamming_se = h.se;
      cell.relative_mean = e.mean, cell.relative_se = e.se;
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

AssumptionDiagnostics compute_diagnostics(const MultiLayerNetwork& net, const ExpectationStack& omega, double rho,
                                          Index n, Index L) {
  if (net.n() != n || omega.n != n || net.L() != L || omega.L() != L) {
    throw DimensionError("network, expectation stack and (n, L) disagree");
  }
  MatrixXd first = MatrixXd::Zero(n, n);
  MatrixXd second = MatrixXd::Zero(n, n);
  for (Index l = 0; l < L; ++l) {
    const SparseMatrix& a = net.layer(l);
    const MatrixXd& o = omega.layers[static_cast<std::size_t>(l)];
    if (o.rows() != n || o.cols() != n) throw DimensionError("expectation layer has the wrong size");
    first += MatrixXd(a) - o;
    const SparseMatrix a2 = a * a;
    second += MatrixXd(a2);
    second.noalias() -= o * o;
  }
  AssumptionDiagnostics d;
  d.tau = n > 0 ? first.cwiseAbs().maxCoeff() : 0.0;
  d.tau_tilde = n > 0 ? second.cwiseAbs().maxCoeff() : 0.0;
  const double log_term = std::log(static_cast<double>(n + L));
  const double nd = static_cast<double>(n);
  const double ld = static_cast<double>(L);
  d.assumption1_holds = rho * nd * ld >= d.tau * d.tau * log_term;
  d.assumption3_holds = rho * rho * nd * nd * ld >= d.tau_tilde * d.tau_tilde * log_term;
  return d;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UnusableDataError("slope fit needs at least two paired points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) {
      throw UnusableDataError("log-log fit needs positive finite values");
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double count = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / count;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw UnusableDataError("slope fit needs distinct x values");
  return sxy / sxx;
}

double rate_slope_check(const ExperimentResult& result, SweepAxis axis, Method method) {
  if (axis != result.config.axis) {
    throw ConfigError("result sweeps " + std::string(axis_name(result.config.axis)) + ", not " +
                      std::string(axis_name(axis)));
  }
  const auto cells = result.series(method);
  if (cells.size() < 4) throw UnusableDataError("rate check needs at least 4 sweep points");
  std::vector<double> x;
  std::vector<double> y;
  for (const CellResult* c : cells) {
    x.push_back(c->value);
    y.push_back(c->hamming_mean);
  }
  return log_log_slope(x, y);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UnusableDataError("correlation needs at least two paired points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double count = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / count;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / count;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace mlmmsb
