#ifndef MLMMSB_MODEL_HPP
#define MLMMSB_MODEL_HPP

#include "mlmmsb/common.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <vector>

namespace mlmmsb {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Row-stochastic n x K membership matrix. Row i holds the weights with which
/// node i belongs to each of the K communities.
class MembershipMatrix {
 public:
  /// Validates nonnegativity, [0,1] range and unit row sums (within 1e-12).
  /// Throws DimensionError on violation.
  explicit MembershipMatrix(MatrixXd rows,
                            std::optional<std::vector<Index>> pure_index_hint = std::nullopt);

  Index n() const { return rows_.rows(); }
  Index K() const { return rows_.cols(); }
  const MatrixXd& rows() const { return rows_; }
  const std::optional<std::vector<Index>>& pure_index_hint() const { return pure_hint_; }

  /// Ground-truth check: the K-th singular value must exceed 1e-10.
  bool has_full_rank() const;

  static constexpr double kRowSumTolerance = 1e-12;

 private:
  MatrixXd rows_;
  std::optional<std::vector<Index>> pure_hint_;
};

/// L symmetric K x K connectivity matrices and the sparsity scale rho.
class ConnectivityStack {
 public:
  ConnectivityStack(std::vector<MatrixXd> matrices, double rho);

  Index K() const { return K_; }
  Index L() const { return static_cast<Index>(matrices_.size()); }
  double rho() const { return rho_; }
  const std::vector<MatrixXd>& matrices() const { return matrices_; }
  const MatrixXd& operator[](Index l) const { return matrices_[static_cast<std::size_t>(l)]; }

  ConnectivityStack with_rho(double rho) const { return ConnectivityStack(matrices_, rho); }

 private:
  Index K_;
  std::vector<MatrixXd> matrices_;
  double rho_;
};

/// L symmetric n x n adjacency matrices over a shared node set.
class MultiLayerNetwork {
 public:
  /// Checks symmetry and, when binary is set, that every stored value is 1.
  MultiLayerNetwork(std::vector<SparseMatrix> layers, bool binary = true,
                    bool allow_self_loops = true);

  Index n() const { return n_; }
  Index L() const { return static_cast<Index>(layers_.size()); }
  bool binary() const { return binary_; }
  bool allow_self_loops() const { return allow_self_loops_; }
  const std::vector<SparseMatrix>& layers() const { return layers_; }
  const SparseMatrix& layer(Index l) const { return layers_[static_cast<std::size_t>(l)]; }

  /// Degree vector of a layer (row sums).
  VectorXd degrees(Index l) const;
  Index edge_count(Index l) const;

  friend bool operator==(const MultiLayerNetwork& a, const MultiLayerNetwork& b);

 private:
  Index n_;
  std::vector<SparseMatrix> layers_;
  bool binary_;
  bool allow_self_loops_;
};

/// Dense expected adjacency matrices Omega_l = rho Pi B_l Pi^T.
struct ExpectationStack {
  Index n = 0;
  std::vector<MatrixXd> layers;

  Index L() const { return static_cast<Index>(layers.size()); }
};

ExpectationStack expected_adjacency(const MembershipMatrix& pi, const ConnectivityStack& conn);

struct SampleOptions {
  bool allow_self_loops = true;
};

/// Draws every upper-triangular entry (diagonal included unless disabled)
/// as an independent Bernoulli(Omega_l(i,j)) and mirrors it. Layer l uses the
/// stream derive_seed(seed, l).
MultiLayerNetwork sample_mlmmsb(const MembershipMatrix& pi, const ConnectivityStack& conn,
                                std::uint64_t seed, SampleOptions options = {},
                                Diagnostics* diagnostics = nullptr);

/// Mixed row of the K = 3 simulation recipe from two uniform draws.
Eigen::RowVector3d mixed_row_k3(double r1, double r2);

/// First K*n0 nodes are pure (blocks of n0 per community); the rest are
/// mixed. K = 3 follows the two-uniform recipe, other K use Dirichlet(1,...,1).
MembershipMatrix generate_membership(Index n, Index K, Index n0, std::uint64_t seed);

/// Symmetric B_l with i.i.d. Uniform[0,1] upper-triangular entries.
ConnectivityStack generate_connectivity(Index K, Index L, std::uint64_t seed, double rho = 1.0);

/// Warning text when |lambda_K(sum_l B_l)| < 1e-8 L, else empty.
std::optional<std::string> connectivity_rank_warning(const ConnectivityStack& conn);

}  // namespace mlmmsb

#endif  // MLMMSB_MODEL_HPP
