#include "mlmmsb/aggregate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mlmmsb {

AggregateMatrix::AggregateMatrix(AggregateKind kind, MatrixXd dense)
    : kind_(kind), n_(dense.rows()), storage_(std::move(dense)) {
  const auto& m = std::get<MatrixXd>(storage_);
  if (m.rows() != m.cols()) throw DimensionError("aggregate matrix must be square");
}

AggregateMatrix::AggregateMatrix(AggregateKind kind, Index n, Operator apply)
    : kind_(kind), n_(n), storage_(std::move(apply)) {}

const MatrixXd& AggregateMatrix::dense() const {
  if (!is_dense()) throw UnsupportedInputError("aggregate is stored implicitly");
  return std::get<MatrixXd>(storage_);
}

MatrixXd AggregateMatrix::apply(const MatrixXd& x) const {
  if (x.rows() != n_) throw DimensionError("operand has the wrong number of rows");
  if (is_dense()) return std::get<MatrixXd>(storage_) * x;
  return std::get<Operator>(storage_)(x);
}

MatrixXd AggregateMatrix::to_dense() const {
  if (is_dense()) return std::get<MatrixXd>(storage_);
  MatrixXd out(n_, n_);
  constexpr Index kBlock = 256;
  for (Index c = 0; c < n_; c += kBlock) {
    const Index w = std::min(kBlock, n_ - c);
    MatrixXd e = MatrixXd::Zero(n_, w);
    for (Index j = 0; j < w; ++j) e(c + j, j) = 1.0;
    out.middleCols(c, w) = apply(e);
  }
  return out;
}

namespace {

void add_sparse(MatrixXd& dense, const SparseMatrix& s, double scale = 1.0) {
  for (Index c = 0; c < s.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(s, c); it; ++it) dense(it.row(), it.col()) += scale * it.value();
  }
}

void require_nonempty(const MultiLayerNetwork& net) {
  if (net.n() == 0) throw EmptyNetworkError("network has no nodes");
}

}  // namespace

AggregateMatrix build_asum(const MultiLayerNetwork& net, AggregateOptions options) {
  require_nonempty(net);
  const Index n = net.n();
  if (n <= options.dense_limit) {
    MatrixXd sum = MatrixXd::Zero(n, n);
    for (const auto& a : net.layers()) add_sparse(sum, a);
    return AggregateMatrix(AggregateKind::Sum, std::move(sum));
  }
  SparseMatrix sum(n, n);
  for (const auto& a : net.layers()) sum += a;
  return AggregateMatrix(AggregateKind::Sum, n,
                         [sum = std::move(sum)](const MatrixXd& x) -> MatrixXd { return sum * x; });
}

namespace {

AggregateMatrix build_squared(const MultiLayerNetwork& net, AggregateKind kind, bool debias,
                              AggregateOptions options) {
  require_nonempty(net);
  const Index n = net.n();
  std::vector<VectorXd> degrees;
  degrees.reserve(static_cast<std::size_t>(net.L()));
  for (Index l = 0; l < net.L(); ++l) degrees.push_back(net.degrees(l));

  if (n <= options.dense_limit) {
    MatrixXd sum = MatrixXd::Zero(n, n);
    for (Index l = 0; l < net.L(); ++l) {
      const SparseMatrix& a = net.layer(l);
      const SparseMatrix squared = a * a;
      add_sparse(sum, squared);
      if (debias) sum.diagonal() -= degrees[static_cast<std::size_t>(l)];
    }
    return AggregateMatrix(kind, std::move(sum));
  }

  VectorXd total_degree = VectorXd::Zero(n);
  if (debias) {
    for (const auto& d : degrees) total_degree += d;
  }
  // Implicit operator y -> sum_l A_l (A_l y) - D_l y; the squared layers of
  // sparse networks are much denser than the layers themselves.
  return AggregateMatrix(kind, n, [layers = net.layers(), total_degree, debias](const MatrixXd& x) -> MatrixXd {
    MatrixXd y = MatrixXd::Zero(x.rows(), x.cols());
    for (const auto& a : layers) {
      const MatrixXd ax = a * x;
      y.noalias() += a * ax;
    }
    if (debias) y -= total_degree.asDiagonal() * x;
    return y;
  });
}

}  // namespace

AggregateMatrix build_ssum_debiased(const MultiLayerNetwork& net, AggregateOptions options) {
  if (!net.binary()) {
    throw UnsupportedInputError("debiased sum of squares requires binary layers");
  }
  return build_squared(net, AggregateKind::DebiasedSoS, true, options);
}

AggregateMatrix build_sos(const MultiLayerNetwork& net, AggregateOptions options) {
  return build_squared(net, AggregateKind::SoS, false, options);
}

AggregateMatrix aggregate_from_expectation(const ExpectationStack& omega, AggregateKind kind) {
  if (omega.layers.empty()) throw DimensionError("expectation stack has no layers");
  const Index n = omega.n;
  MatrixXd sum = MatrixXd::Zero(n, n);
  for (const auto& o : omega.layers) {
    if (o.rows() != n || o.cols() != n) throw DimensionError("expectation layer has wrong size");
    switch (kind) {
      case AggregateKind::Sum:
        sum += o;
        break;
      case AggregateKind::DebiasedSoS:
        sum.noalias() += o * o;
        break;
      case AggregateKind::SoS:
        sum.noalias() += o * o;
        sum.diagonal() += o.rowwise().sum();
        break;
    }
  }
  sum = 0.5 * (sum + sum.transpose()).eval();
  return AggregateMatrix(kind, std::move(sum));
}

void normalize_signs(MatrixXd& vectors) {
  for (Index k = 0; k < vectors.cols(); ++k) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, k));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors.rows() > 0 && vectors(best, k) < 0.0) vectors.col(k) = -vectors.col(k);
  }
}

namespace {

// Positions of the eigenvalues sorted by magnitude descending, then signed
// value descending, then original position.
std::vector<Index> magnitude_order(const VectorXd& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double ma = std::abs(values(a));
    const double mb = std::abs(values(b));
    if (ma != mb) return ma > mb;
    return values(a) > values(b);
  });
  return order;
}

void check_gap(Embedding& emb, double kth, double next) {
  const double gap = std::abs(kth) - std::abs(next);
  if (gap <= 1e-10 * std::abs(kth)) {
    emb.warnings.push_back("DegeneracyWarning: eigenvalue magnitude tie at the K/K+1 boundary (|lambda_K| = " +
                           std::to_string(std::abs(kth)) + ", |lambda_K+1| = " +
                           std::to_string(std::abs(next)) + ")");
  }
}

Embedding dense_top_k(const MatrixXd& m, Index K) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw RankDeficiencyError("dense eigensolver failed to converge");
  const auto order = magnitude_order(es.eigenvalues());
  Embedding emb;
  emb.vectors.resize(m.rows(), K);
  emb.eigenvalues.resize(K);
  for (Index k = 0; k < K; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    emb.vectors.col(k) = es.eigenvectors().col(src);
    emb.eigenvalues(k) = es.eigenvalues()(src);
  }
  if (K < m.rows()) check_gap(emb, emb.eigenvalues(K - 1), es.eigenvalues()(order[static_cast<std::size_t>(K)]));
  return emb;
}

MatrixXd orthonormal_basis(const MatrixXd& x) {
  Eigen::HouseholderQR<MatrixXd> qr(x);
  return qr.householderQ() * MatrixXd::Identity(x.rows(), x.cols());
}

// Restarted block Krylov iteration with Rayleigh-Ritz extraction. The Krylov
// space of M captures both ends of the spectrum, so ordering the Ritz values
// by magnitude targets the largest |lambda| without shifting.
Embedding iterative_top_k(const AggregateMatrix& agg, Index K, const EigenOptions& options) {
  const Index n = agg.n();
  const Index block = std::min(n, K + std::max<Index>(K, 8));
  constexpr Index kDepth = 4;
  if (kDepth * block * 2 >= n) return dense_top_k(agg.to_dense(), K);

  Rng rng(options.seed);
  MatrixXd x(n, block);
  for (Index j = 0; j < block; ++j) {
    for (Index i = 0; i < n; ++i) x(i, j) = rng.uniform() - 0.5;
  }
  x = orthonormal_basis(x);

  Embedding emb;
  VectorXd ritz_next;
  double worst_residual = 0.0;
  for (int restart = 0; restart < options.max_restarts; ++restart) {
    MatrixXd krylov(n, kDepth * block);
    krylov.leftCols(block) = x;
    for (Index d = 1; d < kDepth; ++d) {
      MatrixXd next = agg.apply(krylov.middleCols((d - 1) * block, block));
      // Normalize columns so powers of large eigenvalues do not swamp the QR.
      for (Index j = 0; j < block; ++j) {
        const double norm = next.col(j).norm();
        if (norm > 0.0) next.col(j) /= norm;
      }
      krylov.middleCols(d * block, block) = next;
    }
    const MatrixXd q = orthonormal_basis(krylov);
    const MatrixXd mq = agg.apply(q);
    MatrixXd t = q.transpose() * mq;
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
    const auto order = magnitude_order(es.eigenvalues());

    MatrixXd coeffs(q.cols(), block);
    VectorXd values(block);
    for (Index k = 0; k < block; ++k) {
      coeffs.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
      values(k) = es.eigenvalues()(order[static_cast<std::size_t>(k)]);
    }
    const MatrixXd ritz = q * coeffs;
    const MatrixXd residual = mq * coeffs.leftCols(K) - ritz.leftCols(K) * values.head(K).asDiagonal();
    const double scale = std::max(1.0, std::abs(values(0)));
    worst_residual = 0.0;
    for (Index k = 0; k < K; ++k) worst_residual = std::max(worst_residual, residual.col(k).norm() / scale);

    emb.vectors = ritz.leftCols(K);
    emb.eigenvalues = values.head(K);
    ritz_next = values.tail(block - K);
    x = ritz;
    if (worst_residual <= options.tolerance) break;
  }
  if (worst_residual > 1e-8) {
    emb.warnings.push_back("iterative eigensolver stopped with relative residual " + std::to_string(worst_residual));
  }
  if (K < n && ritz_next.size() > 0) check_gap(emb, emb.eigenvalues(K - 1), ritz_next(0));
  return emb;
}

}  // namespace

Embedding top_k_eigen(const AggregateMatrix& agg, Index K, EigenOptions options) {
  if (K < 1 || K > agg.n()) {
    throw DimensionError("K = " + std::to_string(K) + " must lie in [1, n = " + std::to_string(agg.n()) + "]");
  }
  Embedding emb = (agg.is_dense() && agg.n() <= options.dense_solver_limit)
                      ? dense_top_k(agg.dense(), K)
                      : iterative_top_k(agg, K, options);
  normalize_signs(emb.vectors);
  return emb;
}

}  // namespace mlmmsb
