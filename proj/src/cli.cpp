#include "mlmmsb/cli.hpp"

#include "mlmmsb/chart.hpp"
#include "mlmmsb/estimators.hpp"
#include "mlmmsb/experiments.hpp"
#include "mlmmsb/io.hpp"
#include "mlmmsb/metrics.hpp"
#include "mlmmsb/model.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <iostream>

namespace mlmmsb {

namespace {

struct DatasetAlias {
  const char* alias;
  const char* file;
};

constexpr DatasetAlias kAliases[] = {
    {"lazega", "Lazega-Law-Firm_multiplex.edges"},
    {"celegans", "celegans_connectome_multiplex.edges"},
    {"cs-aarhus", "CS-Aarhus_multiplex.edges"},
    {"fao-trade", "fao_trade_multiplex.edges"},
};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string fixed(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

std::pair<Index, Index> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const Index k = std::stol(text);
      return {k, k};
    }
    return {std::stol(text.substr(0, dots)), std::stol(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ConfigError("K range '" + text + "' is not of the form a..b");
  }
}

struct DataArgs {
  std::string data;
  std::string data_dir;
  bool keep_weights = false;
  bool drop_self_loops = false;
  Index nodes = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", data, "Edge-list file (`layer u v [weight]`) or dataset alias")->required();
    cmd->add_option("--data-dir", data_dir, "Directory searched for dataset aliases (default: $MLMMSB_DATA_DIR or ./data)");
    cmd->add_flag("--keep-weights", keep_weights, "Keep edge weights instead of binarizing (refused by spdsos)");
    cmd->add_flag("--drop-self-loops", drop_self_loops, "Ignore edges from a node to itself");
    cmd->add_option("--nodes", nodes, "Declare node ids 1..N instead of remapping the ids present in the file");
  }

  LoadedNetwork load() const {
    std::filesystem::path dir = data_dir;
    if (dir.empty()) {
      const char* env = std::getenv("MLMMSB_DATA_DIR");
      dir = env ? env : "data";
    }
    const auto path = resolve_dataset(data, dir);
    if (!path) {
      throw IoError("dataset '" + data + "' not found (looked for a file of that name and under '" + dir.string() +
                    "')");
    }
    ReadOptions options;
    options.binarize = !keep_weights;
    options.drop_self_loops = drop_self_loops;
    if (nodes > 0) options.node_count = nodes;
    return read_multiplex_edges(*path, options);
  }
};

void print_classification(std::ostream& out, const NodeClassification& c, Index n) {
  Index mixed = 0;
  Index pure = 0;
  for (auto label : c.labels) {
    mixed += label == NodeLabel::HighlyMixed;
    pure += label == NodeLabel::HighlyPure;
  }
  out << "nodes            " << n << "\n"
      << "highly mixed     " << mixed << "\n"
      << "highly pure      " << pure << "\n"
      << "neutral          " << (n - mixed - pure) << "\n"
      << "sigma_mixed      " << fixed(c.sigma_mixed, 4) << "\n"
      << "sigma_pure       " << fixed(c.sigma_pure, 4) << "\n"
      << "upsilon          " << fixed(c.upsilon, 4) << "\n";
}

void print_warnings(std::ostream& err, const Diagnostics& d) {
  for (const auto& w : d.warnings) err << "warning: " << w << "\n";
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix) {
  auto out = p;
  out.replace_extension();
  out += suffix;
  return out;
}

}  // namespace

std::optional<std::filesystem::path> resolve_dataset(const std::string& name, const std::filesystem::path& data_dir) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(name, ec)) return std::filesystem::path(name);
  const std::string key = lower(name);
  for (const auto& a : kAliases) {
    if (key != a.alias) continue;
    if (!std::filesystem::is_directory(data_dir, ec)) return std::nullopt;
    const std::string wanted = lower(a.file);
    for (auto it = std::filesystem::recursive_directory_iterator(data_dir, ec);
         !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
      if (it->is_regular_file(ec) && lower(it->path().filename().string()) == wanted) return it->path();
    }
  }
  return std::nullopt;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed-membership community detection for multi-layer networks"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 1 usage error, 2 data error.\n\n" + config_keys_help());

  // simulate
  auto* sim = app.add_subcommand("simulate", "Sample a multi-layer network and save it as an edge list");
  Index sim_n = 0, sim_k = 3, sim_l = 0, sim_n0 = 0;
  double sim_rho = 0.1;
  std::uint64_t sim_seed = 1;
  std::string sim_out, sim_membership_out;
  bool sim_no_loops = false;
  sim->add_option("--n", sim_n, "Number of nodes")->required();
  sim->add_option("--K", sim_k, "Number of communities")->capture_default_str();
  sim->add_option("--L", sim_l, "Number of layers")->required();
  sim->add_option("--rho", sim_rho, "Sparsity parameter in [0,1]")->required();
  sim->add_option("--n0", sim_n0, "Pure nodes per community")->required();
  sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim->add_option("--out", sim_out, "Output edge list")->required();
  sim->add_option("--membership-out", sim_membership_out, "Write the true membership matrix as CSV");
  sim->add_flag("--no-self-loops", sim_no_loops, "Do not sample diagonal entries");

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate mixed memberships of a multi-layer network");
  DataArgs est_data;
  est_data.add_to(est);
  std::string est_method, est_out;
  Index est_k = 0;
  est->add_option("--method", est_method, "spsum, spdsos or spsos")->required();
  est->add_option("--K", est_k, "Number of communities")->required();
  est->add_option("--out", est_out, "Membership CSV (node,pi_1..pi_K,home,label)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo simulation study");
  std::string exp_preset, exp_config, exp_out, exp_svg, exp_raw;
  std::optional<std::uint64_t> exp_seed;
  std::optional<int> exp_threads, exp_reps;
  auto* preset_opt = exp->add_option("--preset", exp_preset, "exp1..exp4 or exp1-scaled..exp4-scaled");
  auto* config_opt = exp->add_option("--config", exp_config, "Flat key = value config file");
  preset_opt->excludes(config_opt);
  exp->add_option("--seed", exp_seed, "Base seed (overrides preset/config)");
  exp->add_option("--threads", exp_threads, "Worker threads");
  exp->add_option("--reps", exp_reps, "Repetitions per grid point");
  exp->add_option("--out", exp_out, "Results CSV (default: <name>.csv)");
  exp->add_option("--svg", exp_svg, "Hamming-error chart (default: next to the CSV)");
  exp->add_option("--raw", exp_raw, "Per-repetition CSV");

  // select-k
  auto* sel = app.add_subcommand("select-k", "Choose K by maximizing fuzzy modularity");
  DataArgs sel_data;
  sel_data.add_to(sel);
  std::string sel_method = "all", sel_range = "2..6", sel_criterion = "fsum";
  sel->add_option("--method", sel_method, "spsum, spdsos, spsos or all")->capture_default_str();
  sel->add_option("--range", sel_range, "Inclusive K range a..b")->capture_default_str();
  sel->add_option("--criterion", sel_criterion, "fsum or fmean")->capture_default_str();

  // classify
  auto* cls = app.add_subcommand("classify", "Purity report for an estimated membership matrix");
  std::string cls_pi;
  cls->add_option("--pi", cls_pi, "Membership CSV written by `estimate`")->required()->check(CLI::ExistingFile);

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("mlmmsb");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*sim) {
      const MembershipMatrix pi = generate_membership(sim_n, sim_k, sim_n0, derive_seed(sim_seed, 1));
      const ConnectivityStack conn = generate_connectivity(sim_k, sim_l, derive_seed(sim_seed, 2), sim_rho);
      Diagnostics diag;
      const MultiLayerNetwork net = sample_mlmmsb(pi, conn, derive_seed(sim_seed, 3), {!sim_no_loops}, &diag);
      write_multiplex_edges(net, sim_out);
      if (!sim_membership_out.empty()) {
        write_file_atomic(sim_membership_out, format_membership_csv(pi.rows(), classify_nodes(pi)));
      }
      print_warnings(err, diag);
      Index edges = 0;
      for (Index l = 0; l < net.L(); ++l) edges += net.edge_count(l);
      out << "wrote " << sim_out << ": n=" << net.n() << " L=" << net.L() << " edges=" << edges
          << " (read back with --nodes " << net.n() << " to keep isolated nodes)\n";
      return kExitOk;
    }

    if (*est) {
      const LoadedNetwork data = est_data.load();
      const Method method = parse_method(est_method);
      const EstimationResult fit = estimate(data.network, method, est_k);
      const NodeClassification classes = classify_nodes(fit.pi_hat);
      Diagnostics diag = fit.diagnostics;
      const double fsum = q_fsum(data.network, fit.pi_hat);
      const double fmean = q_fmean(data.network, fit.pi_hat, &diag);
      if (!est_out.empty()) {
        write_file_atomic(est_out, format_membership_csv(fit.pi_hat.rows(), classes, data.node_ids));
        write_file_atomic(with_suffix(est_out, ".nodes.csv"), format_node_map(data.node_ids));
      } else {
        out << format_membership_csv(fit.pi_hat.rows(), classes, data.node_ids);
      }
      print_warnings(err, diag);
      out << "method           " << method_name(method) << "\n"
          << "K                " << est_k << "\n"
          << "layers           " << data.network.L() << "\n"
          << "Q_fsum           " << fixed(fsum, 4) << "\n"
          << "Q_fmean          " << fixed(fmean, 4) << "\n";
      print_classification(out, classes, data.network.n());
      return kExitOk;
    }

    if (*exp) {
      ExperimentConfig cfg = !exp_config.empty() ? read_experiment_config(exp_config)
                                                 : preset_config(exp_preset.empty() ? "exp1-scaled" : exp_preset);
      if (exp_seed) cfg.base_seed = *exp_seed;
      if (exp_threads) cfg.threads = *exp_threads;
      if (exp_reps) cfg.repetitions = *exp_reps;
      const ExperimentResult result = run_experiment(cfg);
      const std::filesystem::path csv = exp_out.empty() ? std::filesystem::path(cfg.name + ".csv") : std::filesystem::path(exp_out);
      write_results_csv(result, csv);
      if (!exp_raw.empty()) write_file_atomic(exp_raw, format_raw_csv(result));

      std::vector<Series> series;
      for (Method m : cfg.methods) {
        Series s{std::string(method_name(m)), {}, {}};
        for (const CellResult* c : result.series(m)) {
          s.x.push_back(c->value);
          s.y.push_back(c->hamming_mean);
        }
        series.push_back(std::move(s));
      }
      ChartOptions chart;
      chart.title = cfg.name + ": Hamming error";
      chart.x_label = std::string(axis_name(cfg.axis));
      chart.y_label = "Hamming error";
      const std::filesystem::path svg = exp_svg.empty() ? with_suffix(csv, ".svg") : std::filesystem::path(exp_svg);
      render_line_chart(series, svg, chart);
      out << format_results_csv(result);
      return kExitOk;
    }

    if (*sel) {
      const LoadedNetwork data = sel_data.load();
      const auto [k_min, k_max] = parse_range(sel_range);
      const Criterion criterion = parse_criterion(sel_criterion);
      std::vector<Method> methods;
      if (lower(sel_method) == "all") {
        methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
      } else {
        methods.push_back(parse_method(sel_method));
      }
      for (Method m : methods) {
        const KSelection s = estimate_k(data.network, m, k_min, k_max, criterion);
        out << "# " << method_name(m) << " Q_" << criterion_name(criterion) << "\n";
        for (const auto& entry : s.scores) {
          out << "K=" << entry.K << "  " << (entry.score ? fixed(*entry.score, 4) : "failed: " + entry.error) << "\n";
        }
        out << (methods.size() > 1 ? std::string(method_name(m)) + " " : "") << "(" << s.best_k << ", "
            << fixed(s.best_score, 4) << ")\n";
      }
      return kExitOk;
    }

    if (*cls) {
      const MembershipTable table = read_membership_csv(cls_pi);
      print_classification(out, classify_nodes(table.rows), table.rows.rows());
      return kExitOk;
    }
  } catch (const Error& e) {
    err << e.kind() << ": " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace mlmmsb
