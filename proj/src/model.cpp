#include "mlmmsb/model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace mlmmsb {

MembershipMatrix::MembershipMatrix(MatrixXd rows, std::optional<std::vector<Index>> pure_index_hint)
    : rows_(std::move(rows)), pure_hint_(std::move(pure_index_hint)) {
  if (rows_.cols() < 1) throw DimensionError("membership matrix needs at least one community");
  for (Index i = 0; i < rows_.rows(); ++i) {
    for (Index k = 0; k < rows_.cols(); ++k) {
      const double v = rows_(i, k);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DimensionError("membership entry (" + std::to_string(i) + "," + std::to_string(k) +
                             ") = " + std::to_string(v) + " outside [0,1]");
      }
    }
    if (std::abs(rows_.row(i).sum() - 1.0) > kRowSumTolerance) {
      throw DimensionError("membership row " + std::to_string(i) + " does not sum to 1");
    }
  }
  if (pure_hint_) {
    if (static_cast<Index>(pure_hint_->size()) != K()) {
      throw DimensionError("pure index hint must list one node per community");
    }
    for (Index k = 0; k < K(); ++k) {
      const Index node = (*pure_hint_)[static_cast<std::size_t>(k)];
      if (node < 0 || node >= n() || rows_(node, k) != 1.0) {
        throw DimensionError("pure index hint " + std::to_string(k) + " is not a pure node");
      }
    }
  }
}

bool MembershipMatrix::has_full_rank() const {
  if (n() < K()) return false;
  Eigen::JacobiSVD<MatrixXd> svd(rows_);
  return svd.singularValues()(K() - 1) > 1e-10;
}

ConnectivityStack::ConnectivityStack(std::vector<MatrixXd> matrices, double rho)
    : K_(matrices.empty() ? 0 : matrices.front().rows()), matrices_(std::move(matrices)), rho_(rho) {
  if (matrices_.empty()) throw DimensionError("connectivity stack needs at least one layer");
  if (!(rho_ >= 0.0 && rho_ <= 1.0)) throw ConfigError("rho must lie in [0,1]");
  for (const auto& b : matrices_) {
    if (b.rows() != K_ || b.cols() != K_) throw DimensionError("connectivity matrices must all be K x K");
    if ((b - b.transpose()).cwiseAbs().maxCoeff() != 0.0) {
      throw DimensionError("connectivity matrix is not symmetric");
    }
    if (b.minCoeff() < 0.0 || b.maxCoeff() > 1.0) {
      throw DimensionError("connectivity entries must lie in [0,1]");
    }
  }
}

MultiLayerNetwork::MultiLayerNetwork(std::vector<SparseMatrix> layers, bool binary, bool allow_self_loops)
    : n_(layers.empty() ? 0 : layers.front().rows()),
      layers_(std::move(layers)),
      binary_(binary),
      allow_self_loops_(allow_self_loops) {
  if (layers_.empty()) throw DimensionError("network needs at least one layer");
  for (auto& a : layers_) {
    if (a.rows() != n_ || a.cols() != n_) throw DimensionError("layers must all be n x n");
    a.prune(0.0);
    a.makeCompressed();
    if (SparseMatrix(a - SparseMatrix(a.transpose())).squaredNorm() != 0.0) {
      throw DimensionError("layer is not symmetric");
    }
    for (Index c = 0; c < a.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
        if (it.value() < 0.0) throw DimensionError("negative edge weight");
        if (binary_ && it.value() != 1.0) throw DimensionError("binary layer has a non 0/1 entry");
        if (!allow_self_loops_ && it.row() == it.col()) {
          throw DimensionError("self-loop present although loops are disabled");
        }
      }
    }
  }
}

VectorXd MultiLayerNetwork::degrees(Index l) const {
  const SparseMatrix& a = layer(l);
  VectorXd d = VectorXd::Zero(n_);
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) d(it.row()) += it.value();
  }
  return d;
}

Index MultiLayerNetwork::edge_count(Index l) const {
  const SparseMatrix& a = layer(l);
  Index count = 0;
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      if (it.row() <= it.col()) ++count;
    }
  }
  return count;
}

bool operator==(const MultiLayerNetwork& a, const MultiLayerNetwork& b) {
  if (a.n_ != b.n_ || a.L() != b.L() || a.binary_ != b.binary_) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    if (SparseMatrix(a.layers_[l] - b.layers_[l]).squaredNorm() != 0.0) return false;
  }
  return true;
}

ExpectationStack expected_adjacency(const MembershipMatrix& pi, const ConnectivityStack& conn) {
  if (pi.K() != conn.K()) {
    throw DimensionError("membership has K=" + std::to_string(pi.K()) +
                         " but connectivity has K=" + std::to_string(conn.K()));
  }
  ExpectationStack omega;
  omega.n = pi.n();
  omega.layers.reserve(static_cast<std::size_t>(conn.L()));
  const MatrixXd& p = pi.rows();
  for (const auto& b : conn.matrices()) {
    MatrixXd layer = conn.rho() * (p * b * p.transpose());
    // Symmetrize away rounding differences between (i,j) and (j,i).
    layer = 0.5 * (layer + layer.transpose()).eval();
    omega.layers.push_back(layer.cwiseMax(0.0).cwiseMin(conn.rho()));
  }
  return omega;
}

std::optional<std::string> connectivity_rank_warning(const ConnectivityStack& conn) {
  MatrixXd sum = MatrixXd::Zero(conn.K(), conn.K());
  for (const auto& b : conn.matrices()) sum += b;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sum, Eigen::EigenvaluesOnly);
  const double smallest = es.eigenvalues().cwiseAbs().minCoeff();
  if (smallest < 1e-8 * static_cast<double>(conn.L())) {
    return "sum of connectivity matrices is numerically rank deficient (|lambda_K| = " +
           std::to_string(smallest) + ")";
  }
  return std::nullopt;
}

MultiLayerNetwork sample_mlmmsb(const MembershipMatrix& pi, const ConnectivityStack& conn,
                                std::uint64_t seed, SampleOptions options, Diagnostics* diagnostics) {
  if (pi.K() != conn.K()) throw DimensionError("membership and connectivity disagree on K");
  if (pi.n() < pi.K()) throw DimensionError("need at least K nodes");
  if (diagnostics) {
    if (auto w = connectivity_rank_warning(conn)) diagnostics->warn(*w);
  }

  const Index n = pi.n();
  const MatrixXd& p = pi.rows();
  std::vector<SparseMatrix> layers;
  layers.reserve(static_cast<std::size_t>(conn.L()));
  std::vector<Eigen::Triplet<double>> triplets;

  for (Index l = 0; l < conn.L(); ++l) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(l)));
    const MatrixXd pb = p * conn[l];
    triplets.clear();
    for (Index i = 0; i < n; ++i) {
      const Index j0 = options.allow_self_loops ? i : i + 1;
      for (Index j = j0; j < n; ++j) {
        const double prob = conn.rho() * pb.row(i).dot(p.row(j));
        if (rng.bernoulli(prob)) {
          triplets.emplace_back(i, j, 1.0);
          if (i != j) triplets.emplace_back(j, i, 1.0);
        }
      }
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    layers.push_back(std::move(a));
  }
  return MultiLayerNetwork(std::move(layers), true, options.allow_self_loops);
}

Eigen::RowVector3d mixed_row_k3(double r1, double r2) {
  return {r1 / 2.0, r2 / 2.0, 1.0 - r1 / 2.0 - r2 / 2.0};
}

MembershipMatrix generate_membership(Index n, Index K, Index n0, std::uint64_t seed) {
  if (K < 1 || n < 1 || n0 < 0) throw ConfigError("n and K must be positive, n0 nonnegative");
  if (K * n0 > n) {
    throw ConfigError("K*n0 = " + std::to_string(K * n0) + " exceeds n = " + std::to_string(n));
  }
  MatrixXd rows = MatrixXd::Zero(n, K);
  for (Index k = 0; k < K; ++k) {
    for (Index t = 0; t < n0; ++t) rows(k * n0 + t, k) = 1.0;
  }
  Rng rng(seed);
  for (Index i = K * n0; i < n; ++i) {
    if (K == 1) {
      rows(i, 0) = 1.0;
    } else if (K == 3) {
      const double r1 = rng.uniform();
      const double r2 = rng.uniform();
      rows.row(i) = mixed_row_k3(r1, r2);
    } else {
      // Dirichlet(1,...,1) via normalized exponentials.
      for (Index k = 0; k < K; ++k) rows(i, k) = -std::log(rng.uniform_open0());
      const double total = rows.row(i).sum();
      if (total > 0.0) {
        rows.row(i) /= total;
      } else {
        rows.row(i).setConstant(1.0 / static_cast<double>(K));
      }
    }
  }
  std::optional<std::vector<Index>> hint;
  if (n0 > 0) {
    hint.emplace();
    for (Index k = 0; k < K; ++k) hint->push_back(k * n0);
  }
  return MembershipMatrix(std::move(rows), std::move(hint));
}

ConnectivityStack generate_connectivity(Index K, Index L, std::uint64_t seed, double rho) {
  if (K < 1 || L < 1) throw ConfigError("K and L must be positive");
  Rng rng(seed);
  std::vector<MatrixXd> matrices;
  matrices.reserve(static_cast<std::size_t>(L));
  for (Index l = 0; l < L; ++l) {
    MatrixXd b(K, K);
    for (Index k = 0; k < K; ++k) {
      for (Index kk = k; kk < K; ++kk) {
        b(k, kk) = b(kk, k) = rng.uniform();
      }
    }
    matrices.push_back(std::move(b));
  }
  return ConnectivityStack(std::move(matrices), rho);
}

}  // namespace mlmmsb
