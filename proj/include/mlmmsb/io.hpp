#ifndef MLMMSB_IO_HPP
#define MLMMSB_IO_HPP

#include "mlmmsb/common.hpp"
#include "mlmmsb/experiments.hpp"
#include "mlmmsb/metrics.hpp"
#include "mlmmsb/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mlmmsb {

/// One line of a multiplex edge list: `layer u v [weight]`, ids 1-based.
struct EdgeRecord {
  long long layer = 0;
  long long u = 0;
  long long v = 0;
  std::optional<double> weight;
};

struct ReadOptions {
  /// Any positive weight becomes 1 and duplicate edges collapse.
  bool binarize = true;
  bool drop_self_loops = false;
  /// When set, node ids are taken as 1..node_count instead of being
  /// remapped from the ids that occur in the file. Keeps isolated nodes.
  std::optional<Index> node_count;
  std::optional<Index> layer_count;
};

struct LoadedNetwork {
  MultiLayerNetwork network;
  std::vector<long long> node_ids;   ///< original id of each dense index
  std::vector<long long> layer_ids;  ///< original id of each layer
};

/// Parses one line; returns nullopt for blank and `#` comment lines.
std::optional<EdgeRecord> parse_edge_line(const std::string& line, std::size_t line_number);

LoadedNetwork parse_multiplex_edges(std::istream& in, const ReadOptions& options = {});
LoadedNetwork read_multiplex_edges(const std::filesystem::path& path, const ReadOptions& options = {});

/// Writes each undirected edge once (u <= v). Labels default to 1..n / 1..L.
std::string format_multiplex_edges(const MultiLayerNetwork& net, const std::vector<long long>& node_ids = {},
                                   const std::vector<long long>& layer_ids = {});
void write_multiplex_edges(const MultiLayerNetwork& net, const std::filesystem::path& path,
                           const std::vector<long long>& node_ids = {}, const std::vector<long long>& layer_ids = {});

/// Replaces `path` atomically (write to a sibling temp file, then rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Fixed `%.10g` rendering used by every CSV writer.
std::string format_real(double value);

inline constexpr const char* kResultsHeader =
    "method,sweep_param,sweep_value,repetitions,hamming_mean,hamming_se,relative_mean,relative_se";

/// Aggregated results, one row per (method, sweep value), sorted by method
/// name then value. LF line endings.
std::string format_results_csv(const ExperimentResult& result);
void write_results_csv(const ExperimentResult& result, const std::filesystem::path& path);

struct ResultRow {
  std::string method;
  std::string sweep_param;
  double sweep_value = 0.0;
  int repetitions = 0;
  double hamming_mean = 0.0;
  double hamming_se = 0.0;
  double relative_mean = 0.0;
  double relative_se = 0.0;
};

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

/// Per-repetition values and seeds.
std::string format_raw_csv(const ExperimentResult& result);

/// `node,pi_1..pi_K,home,label`; home is 1-based.
std::string format_membership_csv(const MatrixXd& pi_hat, const NodeClassification& classes,
                                  const std::vector<long long>& node_ids = {});

struct MembershipTable {
  std::vector<long long> node_ids;
  MatrixXd rows;
};

MembershipTable read_membership_csv(const std::filesystem::path& path);

/// `index,node_id` remapping table (index is 0-based).
std::string format_node_map(const std::vector<long long>& node_ids);

/// Flat `key = value` experiment configuration. Recognized keys are listed
/// in config_keys_help(). A `preset` key, if present, is applied first.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig read_experiment_config(const std::filesystem::path& path);
std::string config_keys_help();

}  // namespace mlmmsb

#endif  // MLMMSB_IO_HPP
