#include "mlmmsb/chart.hpp"
#include "mlmmsb/io.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <unistd.h>
#include <fstream>
#include <sstream>

using namespace mlmmsb;
namespace fs = std::filesystem;

namespace {

LoadedNetwork parse(const std::string& text, ReadOptions options = {}) {
  std::istringstream in(text);
  return parse_multiplex_edges(in, options);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mlmmsb_io_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Well-formedness oracle: an independent XML parser.
bool python_parses_xml(const fs::path& p) {
  const std::string cmd = "python3 -c \"import sys, xml.etree.ElementTree as E; E.parse(sys.argv[1])\" '" +
                          p.string() + "' 2>/dev/null";
  return std::system(cmd.c_str()) == 0;
}

bool python_available() { return std::system("python3 -c 'import xml' >/dev/null 2>&1") == 0; }

ExperimentResult small_result() {
  ExperimentConfig cfg;
  cfg.name = "io";
  cfg.n = 40;
  cfg.L = 3;
  cfg.n0 = 5;
  cfg.values = {0.3, 0.6};
  cfg.repetitions = 2;
  cfg.methods = {Method::SPSoS, Method::SPSum};
  return run_experiment(cfg);
}

}  // namespace

TEST(EdgeList, MinimalFile) {
  const auto data = parse("1 1 2\n");
  EXPECT_EQ(data.network.n(), 2);
  EXPECT_EQ(data.network.L(), 1);
  EXPECT_EQ(data.network.edge_count(0), 1);
  const MatrixXd a(data.network.layer(0));
  EXPECT_EQ(a, a.transpose());
}

TEST(EdgeList, SymmetricDuplicatesCollapse) {
  const auto data = parse("# comment\n1 2 1\n\n1 1 2\n");
  EXPECT_EQ(data.network.edge_count(0), 1);
  EXPECT_EQ(data.network.layer(0).nonZeros(), 2);
}

TEST(EdgeList, RemapsSparseIds) {
  const auto data = parse("3 10 40 2.5\n7 40 99\n");
  EXPECT_EQ(data.node_ids, (std::vector<long long>{10, 40, 99}));
  EXPECT_EQ(data.layer_ids, (std::vector<long long>{3, 7}));
  EXPECT_TRUE(data.network.binary());
  EXPECT_EQ(MatrixXd(data.network.layer(0))(0, 1), 1.0);
  EXPECT_EQ(MatrixXd(data.network.layer(1))(1, 2), 1.0);
}

TEST(EdgeList, WeightsAndLoops) {
  ReadOptions keep;
  keep.binarize = false;
  const auto weighted = parse("1 1 2 2.5\n1 2 1 4\n1 3 3\n", keep);
  EXPECT_FALSE(weighted.network.binary());
  EXPECT_EQ(MatrixXd(weighted.network.layer(0))(0, 1), 4.0);
  EXPECT_EQ(MatrixXd(weighted.network.layer(0))(2, 2), 1.0);
  ReadOptions drop;
  drop.drop_self_loops = true;
  const auto dropped = parse("1 1 2\n1 3 3\n", drop);
  EXPECT_EQ(dropped.network.n(), 3);
  EXPECT_EQ(dropped.network.layer(0).nonZeros(), 2);
}

TEST(EdgeList, DeclaredCountsKeepIsolatedNodes) {
  ReadOptions opts;
  opts.node_count = 5;
  opts.layer_count = 2;
  const auto data = parse("1 1 2\n", opts);
  EXPECT_EQ(data.network.n(), 5);
  EXPECT_EQ(data.network.L(), 2);
  EXPECT_THROW(parse("1 1 9\n", opts), ParseError);
}

TEST(EdgeList, Errors) {
  try {
    parse("1 1 2\n1 x 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse("1 2\n"), ParseError);
  EXPECT_THROW(parse("1 2 3 4 5\n"), ParseError);
  EXPECT_THROW(parse("0 1 2\n"), ParseError);
  EXPECT_THROW(parse("1 1 2 -1\n"), ParseError);
  EXPECT_THROW(parse("# nothing\n"), EmptyNetworkError);
  EXPECT_THROW(read_multiplex_edges("/nonexistent/file.edges"), IoError);
}

TEST(EdgeList, IngestionIsIdempotent) {
  const auto pi = generate_membership(50, 3, 5, 1);
  const auto net = sample_mlmmsb(pi, generate_connectivity(3, 4, 2, 0.3), 3);
  const auto first_path = scratch("first.edges");
  write_multiplex_edges(net, first_path);
  ReadOptions opts;
  opts.node_count = 50;
  opts.layer_count = 4;
  const auto first = read_multiplex_edges(first_path, opts);
  EXPECT_TRUE(first.network == net);
  const auto second_path = scratch("second.edges");
  write_multiplex_edges(first.network, second_path, first.node_ids, first.layer_ids);
  EXPECT_TRUE(read_multiplex_edges(second_path, opts).network == first.network);
  EXPECT_EQ(slurp(first_path), slurp(second_path));

  const auto remapped = parse(format_multiplex_edges(net));
  const auto again = parse(format_multiplex_edges(remapped.network, remapped.node_ids, remapped.layer_ids));
  EXPECT_TRUE(again.network == remapped.network);
  EXPECT_EQ(again.node_ids, remapped.node_ids);
}

TEST(ResultsCsv, HeaderSortingAndRoundTrip) {
  const auto result = small_result();
  const std::string csv = format_results_csv(result);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kResultsHeader);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const auto path = scratch("results.csv");
  write_results_csv(result, path);
  const auto rows = read_results_csv(path);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].method, "spsos");
  EXPECT_EQ(rows[2].method, "spsum");
  EXPECT_LT(rows[0].sweep_value, rows[1].sweep_value);
  for (const auto& row : rows) {
    const auto& cell = result.cell(parse_method(row.method), row.sweep_value);
    EXPECT_EQ(row.sweep_param, "rho");
    EXPECT_EQ(row.repetitions, 2);
    EXPECT_NEAR(row.hamming_mean, cell.hamming_mean, 1e-9);
    EXPECT_NEAR(row.hamming_se, cell.hamming_se, 1e-9);
    EXPECT_NEAR(row.relative_mean, cell.relative_mean, 1e-9);
    EXPECT_NEAR(row.relative_se, cell.relative_se, 1e-9);
  }
}

TEST(ResultsCsv, EmptyAndSingleRow) {
  ExperimentResult empty;
  EXPECT_EQ(format_results_csv(empty), std::string(kResultsHeader) + "\n");
  auto result = small_result();
  result.cells.resize(1);
  const std::string csv = format_results_csv(result);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(1.0 / 3.0), "0.3333333333");
}

TEST(ResultsCsv, RawRows) {
  const auto result = small_result();
  const std::string raw = format_raw_csv(result);
  EXPECT_EQ(raw.substr(0, raw.find('\n')), "method,sweep_param,sweep_value,repetition,seed,hamming,relative,error");
  EXPECT_EQ(std::count(raw.begin(), raw.end(), '\n'), 1 + 2 * 2 * 2);
}

TEST(MembershipCsv, RoundTrip) {
  MatrixXd pi(3, 2);
  pi << 1, 0, 0.25, 0.75, 0.5, 0.5;
  const auto classes = classify_nodes(pi);
  const auto path = scratch("pi.csv");
  write_file_atomic(path, format_membership_csv(pi, classes, {7, 8, 12}));
  const std::string text = slurp(path);
  EXPECT_EQ(text.substr(0, text.find('\n')), "node,pi_1,pi_2,home,label");
  EXPECT_NE(text.find("7,1,0,1,highly_pure"), std::string::npos);
  const auto table = read_membership_csv(path);
  EXPECT_EQ(table.node_ids, (std::vector<long long>{7, 8, 12}));
  EXPECT_LT((table.rows - pi).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(format_node_map({7, 8}), "index,node_id\n0,7\n1,8\n");
}

TEST(Config, ParsesKeysOverPreset) {
  std::istringstream in(
      "# scaled run\npreset = exp2-scaled\nrepetitions = 3\nseed = 18446744073709551615\nmethods = spdsos, spsum\n"
      "threads = 2 # trailing comment\n");
  const auto cfg = parse_experiment_config(in);
  EXPECT_EQ(cfg.axis, SweepAxis::L);
  EXPECT_EQ(cfg.n, 300);
  EXPECT_EQ(cfg.repetitions, 3);
  EXPECT_EQ(cfg.base_seed, 18446744073709551615ULL);
  EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::SPDSoS, Method::SPSum}));
  EXPECT_EQ(cfg.threads, 2);

  std::istringstream custom("axis = n\nvalues = 50, 100\nn0 = 5\nrho = 0.2\nself_loops = false\n");
  const auto c2 = parse_experiment_config(custom);
  EXPECT_EQ(c2.values, (std::vector<double>{50, 100}));
  EXPECT_FALSE(c2.allow_self_loops);

  std::istringstream unknown("colour = red\n");
  EXPECT_THROW(parse_experiment_config(unknown), ParseError);
  std::istringstream broken("repetitions\n");
  EXPECT_THROW(parse_experiment_config(broken), ParseError);
  std::istringstream invalid("values = 0.5, 0.1\n");
  EXPECT_THROW(parse_experiment_config(invalid), ConfigError);
  EXPECT_NE(config_keys_help().find("n0_fraction"), std::string::npos);
}

TEST(Chart, SinglePointAndTwoSeries) {
  const std::string one = render_svg({{"a", {1.0}, {2.0}}});
  EXPECT_EQ(std::count(one.begin(), one.end(), '\n') > 0, true);
  std::size_t markers = 0;
  for (auto pos = one.find("<circle"); pos != std::string::npos; pos = one.find("<circle", pos + 1)) ++markers;
  EXPECT_EQ(markers, 1u);

  const std::string two = render_svg({{"spsum", {1, 2, 3}, {0.9, 0.8, 0.7}}, {"sp<d>sos & co", {1, 2, 3}, {0.5, 0.3, 0.2}}},
                                     ChartOptions{"t", "rho", "err", true, true});
  std::size_t lines = 0, legends = 0;
  for (auto pos = two.find("<polyline"); pos != std::string::npos; pos = two.find("<polyline", pos + 1)) ++lines;
  for (auto pos = two.find("class=\"legend\""); pos != std::string::npos; pos = two.find("class=\"legend\"", pos + 1))
    ++legends;
  EXPECT_EQ(lines, 2u);
  EXPECT_EQ(legends, 2u);
  EXPECT_NE(two.find("sp&lt;d&gt;sos &amp; co"), std::string::npos);
}

TEST(Chart, Errors) {
  EXPECT_THROW(render_svg({}), ConfigError);
  EXPECT_THROW(render_svg({{"a", {}, {}}}), ConfigError);
  EXPECT_THROW(render_svg({{"a", {1, 2}, {1}}}), ConfigError);
  EXPECT_THROW(render_svg({{"a", {0, 1}, {1, 2}}}, ChartOptions{"", "x", "y", true, false}), ConfigError);
}

TEST(Chart, WellFormedXml) {
  if (!python_available()) GTEST_SKIP() << "python3 not available for the XML oracle";
  const auto a = scratch("one.svg");
  const auto b = scratch("two.svg");
  render_line_chart({{"x<&>\"'", {1.0}, {2.0}}}, a, ChartOptions{"title & <stuff>", "x", "y"});
  render_line_chart({{"a", {1, 2}, {3, 4}}, {"b", {1, 2}, {2, 1}}}, b, ChartOptions{"", "L", "err", true, true});
  EXPECT_TRUE(python_parses_xml(a));
  EXPECT_TRUE(python_parses_xml(b));
}

TEST(AtomicWrite, ReplacesContentAndFailsCleanly) {
  const auto p = scratch("atomic.txt");
  write_file_atomic(p, "one\n");
  write_file_atomic(p, "two\n");
  EXPECT_EQ(slurp(p), "two\n");
  EXPECT_THROW(write_file_atomic("/nonexistent-dir/x/y.txt", "z"), IoError);
}
