#ifndef MLMMSB_ESTIMATORS_HPP
#define MLMMSB_ESTIMATORS_HPP

#include "mlmmsb/aggregate.hpp"
#include "mlmmsb/common.hpp"
#include "mlmmsb/model.hpp"
#include "mlmmsb/simplex.hpp"

namespace mlmmsb {

struct EstimationResult {
  MembershipMatrix pi_hat;
  VertexSet vertices;
  VectorXd eigenvalues;
  Method method;
  Diagnostics diagnostics;
};

struct EstimatorOptions {
  AggregateOptions aggregate;
  EigenOptions eigen;
};

AggregateKind aggregate_kind(Method method);

/// Builds the aggregate matrix a method works on.
AggregateMatrix build_aggregate(const MultiLayerNetwork& net, Method method, AggregateOptions options = {});

/// Shared back half of every pipeline: top-K eigenvectors, successive
/// projection on their rows, then membership reconstruction.
EstimationResult estimate_from_aggregate(const AggregateMatrix& agg, Index K, Method method,
                                         const EigenOptions& options = {});

EstimationResult estimate(const MultiLayerNetwork& net, Method method, Index K, const EstimatorOptions& options = {});

/// Successive projection on the sum of adjacency matrices.
EstimationResult spsum(const MultiLayerNetwork& net, Index K, const EstimatorOptions& options = {});
/// Successive projection on the debiased sum of squared adjacency matrices.
EstimationResult spdsos(const MultiLayerNetwork& net, Index K, const EstimatorOptions& options = {});
/// Successive projection on the (biased) sum of squared adjacency matrices.
EstimationResult spsos(const MultiLayerNetwork& net, Index K, const EstimatorOptions& options = {});

/// Oracle mode: the same pipeline fed the population aggregate built from
/// the expected adjacency matrices instead of a sampled network.
EstimationResult estimate_oracle(const ExpectationStack& omega, Method method, Index K,
                                 const EigenOptions& options = {});

}  // namespace mlmmsb

#endif  // MLMMSB_ESTIMATORS_HPP
