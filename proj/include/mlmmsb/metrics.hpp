#ifndef MLMMSB_METRICS_HPP
#define MLMMSB_METRICS_HPP

#include "mlmmsb/common.hpp"
#include "mlmmsb/estimators.hpp"
#include "mlmmsb/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mlmmsb {

/// Largest K for which permutations are searched exhaustively.
inline constexpr Index kMaxPermutationK = 8;

struct ErrorReport {
  double hamming = 0.0;
  double relative = 0.0;
  /// best_permutation[k] is the true community matched to estimated column k
  /// under the Hamming-optimal alignment.
  std::vector<Index> best_permutation;
};

/// min over column permutations P of sum_ik |pi_hat - pi_true P| / n.
double hamming_error(const MembershipMatrix& pi_hat, const MembershipMatrix& pi_true);
/// min over column permutations P of ||pi_hat - pi_true P||_F / ||pi_true||_F.
double relative_error(const MembershipMatrix& pi_hat, const MembershipMatrix& pi_true);
ErrorReport compare_memberships(const MembershipMatrix& pi_hat, const MembershipMatrix& pi_true);

/// Fuzzy modularity of the summed adjacency matrix.
double q_fsum(const MultiLayerNetwork& net, const MembershipMatrix& pi_hat);
/// Mean of the per-layer fuzzy modularities; layers without edges are
/// skipped (and reported through diagnostics).
double q_fmean(const MultiLayerNetwork& net, const MembershipMatrix& pi_hat, Diagnostics* diagnostics = nullptr);

/// Fuzzy modularity of one weighted symmetric adjacency matrix.
double fuzzy_modularity(const SparseMatrix& adjacency, const MatrixXd& memberships);

enum class NodeLabel { HighlyMixed, Neutral, HighlyPure };

std::string_view label_name(NodeLabel label);

struct NodeClassification {
  std::vector<Index> home_community;
  std::vector<NodeLabel> labels;
  double sigma_mixed = 0.0;
  double sigma_pure = 0.0;
  /// Smallest over largest column l1 mass.
  double upsilon = 0.0;
};

inline constexpr double kHighlyMixedMax = 0.6;
inline constexpr double kHighlyPureMin = 0.9;

NodeClassification classify_nodes(const MembershipMatrix& pi_hat);
NodeClassification classify_nodes(const MatrixXd& pi_hat);

enum class Criterion { FSum, FMean };

std::string_view criterion_name(Criterion c);
Criterion parse_criterion(std::string_view name);

struct KScore {
  Index K = 0;
  std::optional<double> score;  ///< empty when the estimator failed
  std::string error;
};

struct KSelection {
  Index best_k = 0;
  double best_score = 0.0;
  std::vector<KScore> scores;
};

/// Fits the estimator for each K in [k_min, k_max] and keeps the K with the
/// largest modularity (smaller K on ties). Failing K values are skipped.
KSelection estimate_k(const MultiLayerNetwork& net, Method method, Index k_min, Index k_max, Criterion criterion,
                      const EstimatorOptions& options = {});

}  // namespace mlmmsb

#endif  // MLMMSB_METRICS_HPP
