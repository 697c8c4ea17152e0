#include "mlmmsb/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

namespace mlmmsb {

namespace {

void check_comparable(const MembershipMatrix& a, const MembershipMatrix& b) {
  if (a.n() != b.n() || a.K() != b.K()) {
    throw DimensionError("membership matrices differ in shape (" + std::to_string(a.n()) + "x" +
                         std::to_string(a.K()) + " vs " + std::to_string(b.n()) + "x" + std::to_string(b.K()) + ")");
  }
  if (a.K() > kMaxPermutationK) {
    throw UnsupportedKError("exhaustive permutation search supports K <= 8, got K = " + std::to_string(a.K()));
  }
}

struct Alignment {
  double cost;
  std::vector<Index> perm;
};

// cost(k, j): discrepancy between estimated column k and true column j.
Alignment best_alignment(const MatrixXd& cost) {
  const Index K = cost.rows();
  std::vector<Index> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), Index{0});
  Alignment best{std::numeric_limits<double>::infinity(), perm};
  do {
    double total = 0.0;
    for (Index k = 0; k < K; ++k) total += cost(k, perm[static_cast<std::size_t>(k)]);
    if (total < best.cost) best = {total, perm};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

MatrixXd column_costs(const MatrixXd& hat, const MatrixXd& truth, bool squared) {
  const Index K = hat.cols();
  MatrixXd cost(K, K);
  for (Index k = 0; k < K; ++k) {
    for (Index j = 0; j < K; ++j) {
      const auto diff = (hat.col(k) - truth.col(j)).array();
      cost(k, j) = squared ? diff.square().sum() : diff.abs().sum();
    }
  }
  return cost;
}

}  // namespace

double hamming_error(const MembershipMatrix& pi_hat, const MembershipMatrix& pi_true) {
  return compare_memberships(pi_hat, pi_true).hamming;
}

double relative_error(const MembershipMatrix& pi_hat, const MembershipMatrix& pi_true) {
  return compare_memberships(pi_hat, pi_true).relative;
}

ErrorReport compare_memberships(const MembershipMatrix& pi_hat, const MembershipMatrix& pi_true) {
  check_comparable(pi_hat, pi_true);
  const Alignment l1 = best_alignment(column_costs(pi_hat.rows(), pi_true.rows(), false));
  const Alignment l2 = best_alignment(column_costs(pi_hat.rows(), pi_true.rows(), true));
  ErrorReport report;
  report.hamming = l1.cost / static_cast<double>(pi_true.n());
  report.relative = std::sqrt(l2.cost) / pi_true.rows().norm();
  report.best_permutation = l1.perm;
  return report;
}

double fuzzy_modularity(const SparseMatrix& adjacency, const MatrixXd& memberships) {
  if (adjacency.rows() != memberships.rows()) throw DimensionError("membership rows differ from node count");
  const Index n = adjacency.rows();
  VectorXd degree = VectorXd::Zero(n);
  for (Index c = 0; c < adjacency.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(adjacency, c); it; ++it) degree(it.row()) += it.value();
  }
  const double m = degree.sum();
  if (!(m > 0.0)) throw EmptyNetworkError("modularity is undefined for a network without edges");

  // The modularity matrix has zero row sums, so subtracting one common row
  // from every membership leaves the score unchanged. Using the first row
  // makes constant memberships (K = 1, uniform rows) cancel exactly.
  const MatrixXd x = memberships.rowwise() - memberships.row(0);
  double within = 0.0;
  for (Index c = 0; c < adjacency.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(adjacency, c); it; ++it) {
      within += it.value() * x.row(it.row()).dot(x.row(it.col()));
    }
  }
  const VectorXd mass = x.transpose() * degree;
  return (within - mass.squaredNorm() / m) / m;
}

double q_fsum(const MultiLayerNetwork& net, const MembershipMatrix& pi_hat) {
  SparseMatrix sum(net.n(), net.n());
  for (const auto& a : net.layers()) sum += a;
  return fuzzy_modularity(sum, pi_hat.rows());
}

double q_fmean(const MultiLayerNetwork& net, const MembershipMatrix& pi_hat, Diagnostics* diagnostics) {
  double total = 0.0;
  Index used = 0;
  for (Index l = 0; l < net.L(); ++l) {
    if (net.layer(l).nonZeros() == 0) {
      if (diagnostics) diagnostics->warn("layer " + std::to_string(l + 1) + " has no edges; skipped in Q_fmean");
      continue;
    }
    total += fuzzy_modularity(net.layer(l), pi_hat.rows());
    ++used;
  }
  if (used == 0) throw EmptyNetworkError("every layer is empty");
  return total / static_cast<double>(used);
}

std::string_view label_name(NodeLabel label) {
  switch (label) {
    case NodeLabel::HighlyMixed: return "highly_mixed";
    case NodeLabel::Neutral: return "neutral";
    case NodeLabel::HighlyPure: return "highly_pure";
  }
  return "unknown";
}

NodeClassification classify_nodes(const MembershipMatrix& pi_hat) { return classify_nodes(pi_hat.rows()); }

NodeClassification classify_nodes(const MatrixXd& pi_hat) {
  const Index n = pi_hat.rows();
  NodeClassification out;
  out.home_community.reserve(static_cast<std::size_t>(n));
  out.labels.reserve(static_cast<std::size_t>(n));
  Index mixed = 0;
  Index pure = 0;
  for (Index i = 0; i < n; ++i) {
    Index home = 0;
    for (Index k = 1; k < pi_hat.cols(); ++k) {
      if (pi_hat(i, k) > pi_hat(i, home)) home = k;
    }
    const double top = pi_hat(i, home);
    NodeLabel label = NodeLabel::Neutral;
    if (top <= kHighlyMixedMax) {
      label = NodeLabel::HighlyMixed;
      ++mixed;
    } else if (top >= kHighlyPureMin) {
      label = NodeLabel::HighlyPure;
      ++pure;
    }
    out.home_community.push_back(home);
    out.labels.push_back(label);
  }
  if (n > 0) {
    out.sigma_mixed = static_cast<double>(mixed) / static_cast<double>(n);
    out.sigma_pure = static_cast<double>(pure) / static_cast<double>(n);
    const VectorXd mass = pi_hat.cwiseAbs().colwise().sum().transpose();
    out.upsilon = mass.maxCoeff() > 0.0 ? mass.minCoeff() / mass.maxCoeff() : 0.0;
  }
  return out;
}

std::string_view criterion_name(Criterion c) { return c == Criterion::FSum ? "fsum" : "fmean"; }

Criterion parse_criterion(std::string_view name) {
  std::string lower(name);
  for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "fsum") return Criterion::FSum;
  if (lower == "fmean") return Criterion::FMean;
  throw ConfigError("unknown criterion '" + std::string(name) + "' (expected fsum or fmean)");
}

KSelection estimate_k(const MultiLayerNetwork& net, Method method, Index k_min, Index k_max, Criterion criterion,
                      const EstimatorOptions& options) {
  const Index upper = std::min(net.n(), kMaxPermutationK);
  if (k_min < 1 || k_max < k_min || k_max > upper) {
    throw ConfigError("K range " + std::to_string(k_min) + ".." + std::to_string(k_max) + " must lie within 1.." +
                      std::to_string(upper));
  }
  const bool has_edges = std::any_of(net.layers().begin(), net.layers().end(),
                                     [](const SparseMatrix& a) { return a.nonZeros() > 0; });
  if (!has_edges) throw EmptyNetworkError("cannot select K on a network without edges");
  // One aggregate serves every candidate K.
  const AggregateMatrix agg = build_aggregate(net, method, options.aggregate);

  KSelection selection;
  bool found = false;
  for (Index K = k_min; K <= k_max; ++K) {
    KScore entry;
    entry.K = K;
    try {
      const EstimationResult fit = estimate_from_aggregate(agg, K, method, options.eigen);
      entry.score = criterion == Criterion::FSum ? q_fsum(net, fit.pi_hat) : q_fmean(net, fit.pi_hat);
      if (!found || *entry.score > selection.best_score) {
        selection.best_k = K;
        selection.best_score = *entry.score;
        found = true;
      }
    } catch (const Error& e) {
      entry.error = std::string(e.kind()) + ": " + e.what();
    }
    selection.scores.push_back(std::move(entry));
  }
  if (!found) throw ModelSelectionError("the estimator failed for every candidate K");
  return selection;
}

}  // namespace mlmmsb
