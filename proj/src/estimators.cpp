#include "mlmmsb/estimators.hpp"

namespace mlmmsb {

AggregateKind aggregate_kind(Method method) {
  switch (method) {
    case Method::SPSum: return AggregateKind::Sum;
    case Method::SPDSoS: return AggregateKind::DebiasedSoS;
    case Method::SPSoS: return AggregateKind::SoS;
  }
  throw ConfigError("unknown method");
}

AggregateMatrix build_aggregate(const MultiLayerNetwork& net, Method method, AggregateOptions options) {
  switch (method) {
    case Method::SPSum: return build_asum(net, options);
    case Method::SPDSoS: return build_ssum_debiased(net, options);
    case Method::SPSoS: return build_sos(net, options);
  }
  throw ConfigError("unknown method");
}

EstimationResult estimate_from_aggregate(const AggregateMatrix& agg, Index K, Method method,
                                         const EigenOptions& options) {
  Embedding emb = top_k_eigen(agg, K, options);
  Diagnostics diagnostics;
  for (auto& w : emb.warnings) diagnostics.warn(std::move(w));
  VertexSet vertices = successive_projection(emb.vectors, K);
  MembershipMatrix pi_hat = estimate_memberships(emb, vertices, &diagnostics);
  return EstimationResult{std::move(pi_hat), std::move(vertices), std::move(emb.eigenvalues), method,
                          std::move(diagnostics)};
}

EstimationResult estimate(const MultiLayerNetwork& net, Method method, Index K, const EstimatorOptions& options) {
  if (K < 1 || K > net.n()) {
    throw DimensionError("K = " + std::to_string(K) + " must lie in [1, n = " + std::to_string(net.n()) + "]");
  }
  return estimate_from_aggregate(build_aggregate(net, method, options.aggregate), K, method, options.eigen);
}

EstimationResult spsum(const MultiLayerNetwork& net, Index K, const EstimatorOptions& options) {
  return estimate(net, Method::SPSum, K, options);
}

EstimationResult spdsos(const MultiLayerNetwork& net, Index K, const EstimatorOptions& options) {
  return estimate(net, Method::SPDSoS, K, options);
}

EstimationResult spsos(const MultiLayerNetwork& net, Index K, const EstimatorOptions& options) {
  return estimate(net, Method::SPSoS, K, options);
}

EstimationResult estimate_oracle(const ExpectationStack& omega, Method method, Index K, const EigenOptions& options) {
  return estimate_from_aggregate(aggregate_from_expectation(omega, aggregate_kind(method)), K, method, options);
}

}  // namespace mlmmsb
