#include "mlmmsb/estimators.hpp"
#include "mlmmsb/metrics.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace mlmmsb;

namespace {

struct Instance {
  MembershipMatrix pi;
  ConnectivityStack conn;
};

Instance instance(Index n, Index K, Index n0, Index L, double rho, std::uint64_t seed) {
  return {generate_membership(n, K, n0, derive_seed(seed, 1)), generate_connectivity(K, L, derive_seed(seed, 2), rho)};
}

}  // namespace

TEST(Estimators, AggregateKinds) {
  EXPECT_EQ(aggregate_kind(Method::SPSum), AggregateKind::Sum);
  EXPECT_EQ(aggregate_kind(Method::SPDSoS), AggregateKind::DebiasedSoS);
  EXPECT_EQ(aggregate_kind(Method::SPSoS), AggregateKind::SoS);
  for (Method m : kAllMethods) EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_EQ(parse_method("SPDSoS"), Method::SPDSoS);
  EXPECT_THROW(parse_method("spectral"), ConfigError);
}

TEST(Estimators, DenseNetworkRecovery) {
  const auto inst = instance(300, 3, 75, 20, 0.9, 17);
  const auto net = sample_mlmmsb(inst.pi, inst.conn, 18);
  for (const auto& f : {spsum(net, 3), spdsos(net, 3), spsos(net, 3)}) {
    EXPECT_EQ(f.pi_hat.n(), 300);
    EXPECT_EQ(f.pi_hat.K(), 3);
    EXPECT_LT((f.pi_hat.rows().rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_GE(f.pi_hat.rows().minCoeff(), 0.0);
    if (f.method != Method::SPSum) EXPECT_LT(hamming_error(f.pi_hat, inst.pi), 0.15) << method_name(f.method);
  }
}

// Uniform random B_l nearly cancel in the sum, leaving lambda_3(sum B_l) of
// order one; the summed aggregate then cannot separate the communities at
// this size. An assortative stack keeps the summed signal intact.
TEST(Estimators, SumRecoveryWithAssortativeBlocks) {
  const auto pi = generate_membership(300, 3, 75, 5);
  Rng rng(6);
  std::vector<MatrixXd> blocks;
  for (int l = 0; l < 20; ++l) {
    MatrixXd b(3, 3);
    for (Index i = 0; i < 3; ++i)
      for (Index j = i; j < 3; ++j) b(i, j) = b(j, i) = i == j ? 0.6 + 0.4 * rng.uniform() : 0.3 * rng.uniform();
    blocks.push_back(b);
  }
  const auto net = sample_mlmmsb(pi, ConnectivityStack(blocks, 0.9), 7);
  EXPECT_LT(hamming_error(spsum(net, 3).pi_hat, pi), 0.15);
}

TEST(Estimators, OracleExactness) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = instance(80, 3, 3 + seed % 5, 5, 0.3, seed);
    const auto omega = expected_adjacency(inst.pi, inst.conn);
    for (Method m : {Method::SPSum, Method::SPDSoS}) {
      const auto fit = estimate_oracle(omega, m, 3);
      EXPECT_LT(hamming_error(fit.pi_hat, inst.pi), 1e-8) << method_name(m) << " seed " << seed;
    }
  }
}

TEST(Estimators, BiasedOracleHasErrorFloor) {
  const auto inst = instance(80, 3, 10, 5, 0.3, 4);
  const auto omega = expected_adjacency(inst.pi, inst.conn);
  const auto exact = estimate_oracle(omega, Method::SPDSoS, 3);
  const auto biased = estimate_oracle(omega, Method::SPSoS, 3);
  EXPECT_LT(hamming_error(exact.pi_hat, inst.pi), 1e-8);
  EXPECT_GT(hamming_error(biased.pi_hat, inst.pi), 1e-6);
}

TEST(Estimators, Deterministic) {
  const auto inst = instance(120, 3, 20, 6, 0.3, 8);
  const auto net = sample_mlmmsb(inst.pi, inst.conn, 9);
  for (Method m : kAllMethods) {
    const auto a = estimate(net, m, 3);
    const auto b = estimate(net, m, 3);
    EXPECT_EQ(a.pi_hat.rows(), b.pi_hat.rows());
    EXPECT_EQ(a.vertices.indices, b.vertices.indices);
  }
}

TEST(Estimators, PermutationEquivariance) {
  const auto inst = instance(90, 3, 15, 8, 0.5, 21);
  const auto net = sample_mlmmsb(inst.pi, inst.conn, 22);
  Rng rng(23);
  std::vector<Index> sigma(90);
  std::iota(sigma.begin(), sigma.end(), 0);
  for (Index i = 89; i > 0; --i) std::swap(sigma[i], sigma[static_cast<Index>(rng.uniform() * (i + 1))]);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(90);
  for (Index i = 0; i < 90; ++i) p.indices()(i) = static_cast<int>(sigma[i]);
  std::vector<SparseMatrix> permuted;
  for (const auto& a : net.layers()) permuted.push_back(MatrixXd(p * MatrixXd(a) * p.transpose()).sparseView());
  const MultiLayerNetwork relabeled(permuted);
  for (Method m : kAllMethods) {
    const MatrixXd original = estimate(net, m, 3).pi_hat.rows();
    const MatrixXd moved = estimate(relabeled, m, 3).pi_hat.rows();
    const MatrixXd expected = p * original;
    EXPECT_LT(testutil::hamming_oracle(moved, expected), 1e-8) << method_name(m);
  }
}

TEST(Estimators, DebiasedBeatsSumOnPairedSeeds) {
  double sum_err = 0, dsos_err = 0;
  for (int r = 0; r < 10; ++r) {
    const auto inst = instance(200, 3, 50, 50, 0.1, derive_seed(600, r));
    const auto net = sample_mlmmsb(inst.pi, inst.conn, derive_seed(601, r));
    sum_err += hamming_error(spsum(net, 3).pi_hat, inst.pi);
    dsos_err += hamming_error(spdsos(net, 3).pi_hat, inst.pi);
  }
  EXPECT_LT(dsos_err, sum_err);
}

TEST(Estimators, SpdsosAggregateHasZeroDiagonal) {
  const auto inst = instance(50, 3, 5, 4, 0.5, 2);
  const auto net = sample_mlmmsb(inst.pi, inst.conn, 3);
  EXPECT_EQ(build_aggregate(net, Method::SPDSoS).dense().diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Estimators, Errors) {
  const auto inst = instance(20, 2, 3, 2, 0.5, 1);
  const auto net = sample_mlmmsb(inst.pi, inst.conn, 1);
  EXPECT_THROW(spsum(net, 21), DimensionError);
  EXPECT_THROW(spsum(net, 0), DimensionError);
  MatrixXd w = MatrixXd::Zero(3, 3);
  w(0, 1) = w(1, 0) = 2.5;
  w(1, 2) = w(2, 1) = 1;
  const auto weighted = testutil::network({w}, false);
  EXPECT_THROW(spdsos(weighted, 2), UnsupportedInputError);
  const auto empty = testutil::network({MatrixXd::Zero(4, 4)});
  EXPECT_FALSE(spsum(empty, 2).diagnostics.warnings.empty());
}
