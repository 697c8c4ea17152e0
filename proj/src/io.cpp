#include "mlmmsb/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <system_error>
#include <tuple>

namespace mlmmsb {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

long long parse_id(const std::string& token, std::size_t line_number, const char* what) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || value < 1) {
    throw ParseError("line " + std::to_string(line_number) + ": " + what + " '" + token +
                     "' is not a positive integer");
  }
  return value;
}

double parse_real(const std::string& token, const std::string& context) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (token.empty() || used != token.size()) throw ParseError(context + ": '" + token + "' is not a number");
  return value;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<long long> dense_ids(Index count) {
  std::vector<long long> ids(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
  return ids;
}

}  // namespace

std::optional<EdgeRecord> parse_edge_line(const std::string& line, std::size_t line_number) {
  const std::string body = trim(line);
  if (body.empty() || body.front() == '#') return std::nullopt;
  std::istringstream in(body);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  if (tokens.size() < 3 || tokens.size() > 4) {
    throw ParseError("line " + std::to_string(line_number) + ": expected 'layer u v [weight]', got " +
                     std::to_string(tokens.size()) + " fields");
  }
  EdgeRecord rec;
  rec.layer = parse_id(tokens[0], line_number, "layer");
  rec.u = parse_id(tokens[1], line_number, "node");
  rec.v = parse_id(tokens[2], line_number, "node");
  if (tokens.size() == 4) {
    const double w = parse_real(tokens[3], "line " + std::to_string(line_number));
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ParseError("line " + std::to_string(line_number) + ": weight must be positive");
    }
    rec.weight = w;
  }
  return rec;
}

LoadedNetwork parse_multiplex_edges(std::istream& in, const ReadOptions& options) {
  std::vector<EdgeRecord> edges;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (auto rec = parse_edge_line(line, number)) edges.push_back(*rec);
  }

  std::vector<long long> node_ids;
  std::vector<long long> layer_ids;
  if (options.node_count) {
    node_ids = dense_ids(*options.node_count);
  } else {
    for (const auto& e : edges) {
      node_ids.push_back(e.u);
      node_ids.push_back(e.v);
    }
    std::sort(node_ids.begin(), node_ids.end());
    node_ids.erase(std::unique(node_ids.begin(), node_ids.end()), node_ids.end());
  }
  if (options.layer_count) {
    layer_ids = dense_ids(*options.layer_count);
  } else {
    for (const auto& e : edges) layer_ids.push_back(e.layer);
    std::sort(layer_ids.begin(), layer_ids.end());
    layer_ids.erase(std::unique(layer_ids.begin(), layer_ids.end()), layer_ids.end());
  }
  if (node_ids.empty()) throw EmptyNetworkError("edge list defines no nodes");
  if (layer_ids.empty()) throw EmptyNetworkError("edge list defines no layers");

  auto lookup = [](const std::vector<long long>& ids, long long id, const char* what) {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
      throw ParseError(std::string(what) + " id " + std::to_string(id) + " exceeds the declared count");
    }
    return static_cast<Index>(it - ids.begin());
  };

  const auto n = static_cast<Index>(node_ids.size());
  // (layer, row, col) -> weight; undirected, so the key uses row <= col.
  std::map<std::tuple<Index, Index, Index>, double> cells;
  for (const auto& e : edges) {
    const Index l = lookup(layer_ids, e.layer, "layer");
    Index a = lookup(node_ids, e.u, "node");
    Index b = lookup(node_ids, e.v, "node");
    if (a == b && options.drop_self_loops) continue;
    if (a > b) std::swap(a, b);
    const double w = options.binarize ? 1.0 : e.weight.value_or(1.0);
    auto [it, inserted] = cells.emplace(std::make_tuple(l, a, b), w);
    if (!inserted) it->second = std::max(it->second, w);
  }

  std::vector<std::vector<Eigen::Triplet<double>>> triplets(layer_ids.size());
  for (const auto& [key, w] : cells) {
    const auto [l, a, b] = key;
    auto& t = triplets[static_cast<std::size_t>(l)];
    t.emplace_back(a, b, w);
    if (a != b) t.emplace_back(b, a, w);
  }
  std::vector<SparseMatrix> layers;
  for (auto& t : triplets) {
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    layers.push_back(std::move(m));
  }
  return LoadedNetwork{MultiLayerNetwork(std::move(layers), options.binarize, !options.drop_self_loops),
                       std::move(node_ids), std::move(layer_ids)};
}

LoadedNetwork read_multiplex_edges(const std::filesystem::path& path, const ReadOptions& options) {
  std::istringstream in(read_all(path));
  return parse_multiplex_edges(in, options);
}

std::string format_multiplex_edges(const MultiLayerNetwork& net, const std::vector<long long>& node_ids,
                                   const std::vector<long long>& layer_ids) {
  const auto nodes = node_ids.empty() ? dense_ids(net.n()) : node_ids;
  const auto layers = layer_ids.empty() ? dense_ids(net.L()) : layer_ids;
  if (static_cast<Index>(nodes.size()) != net.n() || static_cast<Index>(layers.size()) != net.L()) {
    throw DimensionError("label tables do not match the network shape");
  }
  std::string out;
  for (Index l = 0; l < net.L(); ++l) {
    std::vector<std::tuple<Index, Index, double>> edges;
    const SparseMatrix& a = net.layer(l);
    for (Index c = 0; c < a.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
        if (it.row() <= it.col()) edges.emplace_back(it.row(), it.col(), it.value());
      }
    }
    std::sort(edges.begin(), edges.end());
    for (const auto& [u, v, w] : edges) {
      out += std::to_string(layers[static_cast<std::size_t>(l)]) + ' ' + std::to_string(nodes[static_cast<std::size_t>(u)]) +
             ' ' + std::to_string(nodes[static_cast<std::size_t>(v)]);
      if (!net.binary()) out += ' ' + format_real(w);
      out += '\n';
    }
  }
  return out;
}

void write_multiplex_edges(const MultiLayerNetwork& net, const std::filesystem::path& path,
                           const std::vector<long long>& node_ids, const std::vector<long long>& layer_ids) {
  write_file_atomic(path, format_multiplex_edges(net, node_ids, layer_ids));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot replace '" + path.string() + "'");
  }
}

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.10g", value);
  return buffer;
}

std::string format_results_csv(const ExperimentResult& result) {
  std::vector<const CellResult*> rows;
  for (const auto& c : result.cells) rows.push_back(&c);
  std::stable_sort(rows.begin(), rows.end(), [](const CellResult* a, const CellResult* b) {
    const auto ma = method_name(a->method);
    const auto mb = method_name(b->method);
    if (ma != mb) return ma < mb;
    return a->value < b->value;
  });
  std::string out = std::string(kResultsHeader) + '\n';
  const std::string axis(axis_name(result.config.axis));
  for (const CellResult* c : rows) {
    out += std::string(method_name(c->method)) + ',' + axis + ',' + format_real(c->value) + ',' +
           std::to_string(c->successes) + ',' + format_real(c->hamming_mean) + ',' + format_real(c->hamming_se) + ',' +
           format_real(c->relative_mean) + ',' + format_real(c->relative_se) + '\n';
  }
  return out;
}

void write_results_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  write_file_atomic(path, format_results_csv(result));
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::istringstream in(read_all(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultsHeader) {
    throw ParseError("'" + path.string() + "' does not start with the results header");
  }
  std::vector<ResultRow> rows;
  for (std::size_t number = 2; std::getline(in, line); ++number) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    const std::string ctx = "line " + std::to_string(number);
    if (f.size() != 8) throw ParseError(ctx + ": expected 8 fields");
    ResultRow r;
    r.method = f[0];
    r.sweep_param = f[1];
    r.sweep_value = parse_real(f[2], ctx);
    r.repetitions = static_cast<int>(parse_real(f[3], ctx));
    r.hamming_mean = parse_real(f[4], ctx);
    r.hamming_se = parse_real(f[5], ctx);
    r.relative_mean = parse_real(f[6], ctx);
    r.relative_se = parse_real(f[7], ctx);
    rows.push_back(r);
  }
  return rows;
}

std::string format_raw_csv(const ExperimentResult& result) {
  std::string out = "method,sweep_param,sweep_value,repetition,seed,hamming,relative,error\n";
  const std::string axis(axis_name(result.config.axis));
  for (const auto& c : result.cells) {
    for (const auto& r : c.raw) {
      std::string error = r.error;
      std::replace(error.begin(), error.end(), ',', ';');
      out += std::string(method_name(c.method)) + ',' + axis + ',' + format_real(c.value) + ',' +
             std::to_string(r.repetition) + ',' + std::to_string(r.seed) + ',' + format_real(r.hamming) + ',' +
             format_real(r.relative) + ',' + error + '\n';
    }
  }
  return out;
}

std::string format_membership_csv(const MatrixXd& pi_hat, const NodeClassification& classes,
                                  const std::vector<long long>& node_ids) {
  const auto ids = node_ids.empty() ? dense_ids(pi_hat.rows()) : node_ids;
  if (static_cast<Index>(ids.size()) != pi_hat.rows() ||
      static_cast<Index>(classes.labels.size()) != pi_hat.rows()) {
    throw DimensionError("membership table pieces disagree on node count");
  }
  std::string out = "node";
  for (Index k = 0; k < pi_hat.cols(); ++k) out += ",pi_" + std::to_string(k + 1);
  out += ",home,label\n";
  for (Index i = 0; i < pi_hat.rows(); ++i) {
    const auto s = static_cast<std::size_t>(i);
    out += std::to_string(ids[s]);
    for (Index k = 0; k < pi_hat.cols(); ++k) out += ',' + format_real(pi_hat(i, k));
    out += ',' + std::to_string(classes.home_community[s] + 1) + ',' + std::string(label_name(classes.labels[s])) +
           '\n';
  }
  return out;
}

MembershipTable read_membership_csv(const std::filesystem::path& path) {
  std::istringstream in(read_all(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path.string() + "' is empty");
  const auto header = split(trim(line), ',');
  std::vector<std::size_t> pi_columns;
  std::optional<std::size_t> node_column;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].rfind("pi_", 0) == 0) pi_columns.push_back(c);
    if (header[c] == "node") node_column = c;
  }
  if (pi_columns.empty()) throw ParseError("'" + path.string() + "' has no pi_ columns");

  MembershipTable table;
  std::vector<std::vector<double>> rows;
  for (std::size_t number = 2; std::getline(in, line); ++number) {
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    const std::string ctx = "line " + std::to_string(number);
    if (f.size() != header.size()) throw ParseError(ctx + ": expected " + std::to_string(header.size()) + " fields");
    std::vector<double> row;
    for (std::size_t c : pi_columns) {
      const double v = parse_real(f[c], ctx);
      if (!(v >= 0.0)) throw ParseError(ctx + ": membership weights must be nonnegative");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
    table.node_ids.push_back(node_column ? parse_id(f[*node_column], number, "node")
                                         : static_cast<long long>(rows.size()));
  }
  if (rows.empty()) throw EmptyNetworkError("'" + path.string() + "' has no membership rows");
  table.rows.resize(static_cast<Index>(rows.size()), static_cast<Index>(pi_columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < pi_columns.size(); ++k) {
      table.rows(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
    }
  }
  return table;
}

std::string format_node_map(const std::vector<long long>& node_ids) {
  std::string out = "index,node_id\n";
  for (std::size_t i = 0; i < node_ids.size(); ++i) out += std::to_string(i) + ',' + std::to_string(node_ids[i]) + '\n';
  return out;
}

namespace {

std::vector<double> parse_list(const std::string& value, const std::string& ctx) {
  std::vector<double> out;
  for (const auto& item : split(value, ',')) {
    if (!item.empty()) out.push_back(parse_real(item, ctx));
  }
  return out;
}

Index parse_count(const std::string& value, const std::string& ctx) {
  const double v = parse_real(value, ctx);
  if (v < 0 || v != std::floor(v)) throw ParseError(ctx + ": expected a nonnegative integer");
  return static_cast<Index>(v);
}

std::uint64_t parse_seed(const std::string& value, const std::string& ctx) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || end != value.data() + value.size()) throw ParseError(ctx + ": expected an unsigned integer seed");
  return v;
}

bool parse_bool(const std::string& value, const std::string& ctx) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError(ctx + ": expected true or false");
}

}  // namespace

std::string config_keys_help() {
  return "Experiment config files hold one `key = value` per line; `#` starts a comment.\n"
         "Keys:\n"
         "  preset        base preset applied first (exp1..exp4, exp1-scaled..exp4-scaled)\n"
         "  name          label for the run\n"
         "  axis          swept parameter: rho, L, n or n0\n"
         "  values        comma-separated, strictly increasing sweep values\n"
         "  n, L, n0, K   fixed model sizes\n"
         "  rho           fixed sparsity in [0,1]\n"
         "  n0_fraction   if > 0, n0 = round(n0_fraction * n) at every grid point\n"
         "  repetitions   Monte Carlo repetitions per grid point\n"
         "  seed          base seed\n"
         "  methods       comma-separated subset of spsum, spdsos, spsos\n"
         "  threads       worker threads (results do not depend on it)\n"
         "  self_loops    true/false: sample diagonal entries\n";
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::string line;
  std::optional<std::string> preset;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(number) + ": expected key = value");
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key == "preset") {
      preset = value;
    } else {
      entries.push_back({std::move(key), std::move(value), number});
    }
  }

  ExperimentConfig cfg = preset ? preset_config(*preset) : ExperimentConfig{};
  for (const auto& [key, value, number] : entries) {
    const std::string ctx = "config line " + std::to_string(number);
    if (key == "name") cfg.name = value;
    else if (key == "axis") cfg.axis = parse_axis(value);
    else if (key == "values") cfg.values = parse_list(value, ctx);
    else if (key == "n") cfg.n = parse_count(value, ctx);
    else if (key == "L") cfg.L = parse_count(value, ctx);
    else if (key == "n0") cfg.n0 = parse_count(value, ctx);
    else if (key == "K") cfg.K = parse_count(value, ctx);
    else if (key == "rho") cfg.rho = parse_real(value, ctx);
    else if (key == "n0_fraction") cfg.n0_fraction = parse_real(value, ctx);
    else if (key == "repetitions") cfg.repetitions = static_cast<int>(parse_count(value, ctx));
    else if (key == "seed") cfg.base_seed = parse_seed(value, ctx);
    else if (key == "threads") cfg.threads = static_cast<int>(parse_count(value, ctx));
    else if (key == "self_loops") cfg.allow_self_loops = parse_bool(value, ctx);
    else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& m : split(value, ',')) {
        if (!m.empty()) cfg.methods.push_back(parse_method(m));
      }
    } else {
      throw ParseError(ctx + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  std::istringstream in(read_all(path));
  return parse_experiment_config(in);
}

}  // namespace mlmmsb
