#ifndef MLMMSB_SIMPLEX_HPP
#define MLMMSB_SIMPLEX_HPP

#include "mlmmsb/aggregate.hpp"
#include "mlmmsb/common.hpp"
#include "mlmmsb/model.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <limits>
#include <string>
#include <vector>

namespace mlmmsb {

/// Estimated pure-node set, in selection order.
struct VertexSet {
  std::vector<Index> indices;
  std::vector<double> selection_norms;

  Index K() const { return static_cast<Index>(indices.size()); }
};

/// Successive projection: K times, pick the row with the largest residual
/// l2 norm (smallest index on ties) and project all rows onto the orthogonal
/// complement of it.
template <typename Derived>
VertexSet successive_projection(const Eigen::MatrixBase<Derived>& rows, Index K) {
  using Scalar = typename Derived::Scalar;
  if (K < 1 || K > rows.rows()) {
    throw DimensionError("successive projection needs 1 <= K <= n (K = " + std::to_string(K) +
                         ", n = " + std::to_string(rows.rows()) + ")");
  }
  if (!rows.allFinite()) throw DimensionError("successive projection input is not finite");

  Matrix<Scalar> residual = rows;
  VertexSet vs;
  vs.indices.reserve(static_cast<std::size_t>(K));
  vs.selection_norms.reserve(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) {
    const Vector<Scalar> norms = residual.rowwise().norm();
    Index best = 0;
    for (Index i = 1; i < norms.size(); ++i) {
      if (norms(i) > norms(best)) best = i;
    }
    if (!(norms(best) >= Scalar(1e-12))) {
      throw RankDeficiencyError("residual vanished after " + std::to_string(k) + " of " +
                                std::to_string(K) + " successive-projection picks");
    }
    vs.indices.push_back(best);
    vs.selection_norms.push_back(static_cast<double>(norms(best)));

    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> u = residual.row(best) / norms(best);
    const Vector<Scalar> coeff = residual * u.transpose();
    residual.noalias() -= coeff * u;
    residual.row(best).setZero();
  }
  return vs;
}

struct Reconstruction {
  MatrixXd memberships;
  int zero_row_fallbacks = 0;
  double corner_condition = 0.0;
};

inline constexpr double kMaxCornerCondition = 1e12;

/// Expresses every row in the barycentric frame of the vertex rows:
/// Z = rows * rows(vertices,:)^{-1}, negative weights clamped to 0, rows
/// rescaled to unit l1 norm. Rows with no positive weight become uniform.
template <typename Derived>
Reconstruction reconstruct_memberships(const Eigen::MatrixBase<Derived>& rows, const std::vector<Index>& vertices) {
  using Scalar = typename Derived::Scalar;
  const Index K = static_cast<Index>(vertices.size());
  if (K != rows.cols()) throw DimensionError("vertex count must equal the embedding dimension");

  Matrix<Scalar> corner(K, K);
  for (Index k = 0; k < K; ++k) {
    const Index v = vertices[static_cast<std::size_t>(k)];
    if (v < 0 || v >= rows.rows()) throw DimensionError("vertex index out of range");
    corner.row(k) = rows.row(v);
  }

  Reconstruction out;
  const Eigen::JacobiSVD<Matrix<Scalar>> svd(corner);
  const auto& sv = svd.singularValues();
  const double smallest = static_cast<double>(sv(K - 1));
  out.corner_condition = smallest > 0.0 ? static_cast<double>(sv(0)) / smallest
                                        : std::numeric_limits<double>::infinity();
  if (!(out.corner_condition <= kMaxCornerCondition)) {
    throw IllConditionedCornerError("corner matrix condition number " + std::to_string(out.corner_condition) +
                                    " exceeds 1e12");
  }

  // Z^T = corner^{-T} rows^T, solved with partial pivoting.
  const Eigen::PartialPivLU<Matrix<Scalar>> lu(corner.transpose());
  const Matrix<Scalar> zt = lu.solve(rows.transpose());
  out.memberships = zt.transpose().template cast<double>().cwiseMax(0.0);

  for (Index i = 0; i < out.memberships.rows(); ++i) {
    const double total = out.memberships.row(i).sum();
    if (total > 0.0) {
      out.memberships.row(i) /= total;
    } else {
      out.memberships.row(i).setConstant(1.0 / static_cast<double>(K));
      ++out.zero_row_fallbacks;
    }
  }
  return out;
}

/// Membership estimate from an embedding and its hunted vertices.
MembershipMatrix estimate_memberships(const Embedding& emb, const VertexSet& vertices,
                                      Diagnostics* diagnostics = nullptr);

}  // namespace mlmmsb

#endif  // MLMMSB_SIMPLEX_HPP
