#ifndef MLMMSB_AGGREGATE_HPP
#define MLMMSB_AGGREGATE_HPP

#include "mlmmsb/common.hpp"
#include "mlmmsb/model.hpp"

#include <functional>
#include <variant>

namespace mlmmsb {

enum class AggregateKind {
  Sum,          ///< sum_l A_l
  DebiasedSoS,  ///< sum_l (A_l^2 - D_l)
  SoS,          ///< sum_l A_l^2
};

struct AggregateOptions {
  /// Networks with more nodes than this keep their aggregate implicit.
  Index dense_limit = 2048;
};

/// Symmetric n x n aggregate of a multi-layer network. Small aggregates are
/// stored densely; large ones are kept as a linear operator x -> M x.
class AggregateMatrix {
 public:
  using Operator = std::function<MatrixXd(const MatrixXd&)>;

  AggregateMatrix(AggregateKind kind, MatrixXd dense);
  AggregateMatrix(AggregateKind kind, Index n, Operator apply);

  Index n() const { return n_; }
  AggregateKind kind() const { return kind_; }
  bool is_dense() const { return std::holds_alternative<MatrixXd>(storage_); }

  /// Dense storage; throws UnsupportedInputError for implicit aggregates.
  const MatrixXd& dense() const;
  MatrixXd apply(const MatrixXd& x) const;
  /// Materializes an implicit aggregate column block by column block.
  MatrixXd to_dense() const;

 private:
  AggregateKind kind_;
  Index n_;
  std::variant<MatrixXd, Operator> storage_;
};

AggregateMatrix build_asum(const MultiLayerNetwork& net, AggregateOptions options = {});
/// Throws UnsupportedInputError for weighted networks: the debiasing identity
/// (A^2)(i,i) = degree only holds for 0/1 entries.
AggregateMatrix build_ssum_debiased(const MultiLayerNetwork& net, AggregateOptions options = {});
AggregateMatrix build_sos(const MultiLayerNetwork& net, AggregateOptions options = {});

/// Population counterparts built from the expected adjacency matrices:
///   Sum         -> sum_l Omega_l
///   DebiasedSoS -> sum_l Omega_l^2
///   SoS         -> sum_l Omega_l^2 + sum_l E[D_l]
AggregateMatrix aggregate_from_expectation(const ExpectationStack& omega, AggregateKind kind);

struct Embedding {
  MatrixXd vectors;      ///< n x K, orthonormal columns
  VectorXd eigenvalues;  ///< K signed values, |.| non-increasing
  std::vector<std::string> warnings;

  Index n() const { return vectors.rows(); }
  Index K() const { return vectors.cols(); }
};

struct EigenOptions {
  /// Dense aggregates up to this size use a full symmetric eigensolver.
  Index dense_solver_limit = 2000;
  double tolerance = 1e-10;
  int max_restarts = 300;
  std::uint64_t seed = 0x5eed;
};

/// Top-K eigenpairs by magnitude. Ties in magnitude go to the larger signed
/// value, then to the lower solver column. Each eigenvector is flipped so its
/// largest-magnitude entry (lowest index on ties) is positive.
Embedding top_k_eigen(const AggregateMatrix& agg, Index K, EigenOptions options = {});

template <typename Derived>
Embedding top_k_eigen(const Eigen::MatrixBase<Derived>& symmetric, Index K, EigenOptions options = {}) {
  return top_k_eigen(AggregateMatrix(AggregateKind::Sum, MatrixXd(symmetric)), K, options);
}

/// Flips column signs in place per the convention above.
void normalize_signs(MatrixXd& vectors);

}  // namespace mlmmsb

#endif  // MLMMSB_AGGREGATE_HPP
