#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gfbs/block_vector.hpp"
#include "gfbs/matrix_io.hpp"
#include "gfbs/metric.hpp"
#include "helpers.hpp"

using namespace gfbs;
using gfbs::testing::expect_error;
using gfbs::testing::random_psd;
using gfbs::testing::vec;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

// ---- build_metric -----------------------------------------------------------

TEST(BuildMetric, DegenerateDiagonal) {
  const auto Q = build_metric(mat2(1, 0, 0, 0));
  EXPECT_EQ(Q.rank(), 1);
  EXPECT_DOUBLE_EQ(Q.nu(), 1.0);
}

TEST(BuildMetric, Identity3) {
  const auto Q = build_metric(Matrix::Identity(3, 3));
  EXPECT_EQ(Q.rank(), 3);
  EXPECT_NEAR(Q.nu(), 1.0, 1e-15);
}

TEST(BuildMetric, AllOnes2x2) {
  const auto Q = build_metric(mat2(1, 1, 1, 1));
  EXPECT_EQ(Q.rank(), 1);
  EXPECT_NEAR(Q.nu(), 2.0, 1e-14);
}

TEST(BuildMetric, Errors) {
  expect_error(ErrorCode::NotSymmetric, [] { build_metric(mat2(1, 1, 0, 1)); });
  expect_error(ErrorCode::NotPSD, [] { build_metric(mat2(1, 2, 2, 1)); });
  expect_error(ErrorCode::ZeroMetric, [] { build_metric(Matrix::Zero(2, 2)); });
  expect_error(ErrorCode::NonSquare, [] { build_metric(Matrix::Identity(2, 3)); });
}

TEST(BuildMetric, StoredEigenvaluesAndSymmetry) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 6, r = 1 + trial % n;
    Matrix Qm = random_psd(rng, n, r);
    Qm(0, 1) += 1e-14;  // tiny asymmetry within the relative tolerance
    const auto Q = build_metric(Qm);
    EXPECT_TRUE(Q.matrix().isApprox(Q.matrix().transpose(), 0.0));
    EXPECT_GE(Q.eig_values().minCoeff(), 0.0);
    EXPECT_EQ((Q.eig_values().array() > Q.psd_tol()).count(), Q.rank());
    EXPECT_EQ(Q.rank(), r);
    double min_pos = INFINITY;
    for (Index i = 0; i < n; ++i)
      if (Q.eig_values()(i) > Q.psd_tol()) min_pos = std::min(min_pos, Q.eig_values()(i));
    EXPECT_DOUBLE_EQ(Q.nu(), min_pos);
  }
}

// ---- q_norm -----------------------------------------------------------------

TEST(QNorm, Examples) {
  const BlockVector x(BlockLayout::single(2), vec({3, 4}));
  EXPECT_DOUBLE_EQ(q_norm(build_metric(mat2(1, 0, 0, 0)), x), 3.0);
  EXPECT_DOUBLE_EQ(q_norm(build_metric(Matrix::Identity(2, 2)), x), 5.0);
  const BlockVector y(BlockLayout::single(2), vec({1, -1}));
  EXPECT_NEAR(q_norm(build_metric(mat2(2, 1, 1, 2)), y), std::sqrt(2.0), 1e-15);
}

TEST(QNorm, KernelVectorHasZeroNorm) {
  const auto Q = build_metric(mat2(1, 0, 0, 0));
  EXPECT_EQ(Q.norm(vec({0, 7})), 0.0);
}

TEST(QNorm, DimensionMismatch) {
  const auto Q = build_metric(Matrix::Identity(2, 2));
  expect_error(ErrorCode::DimensionMismatch, [&] { Q.norm(vec({1, 2, 3})); });
}

TEST(QNorm, MatchesQuadraticForm) {
  SplitMix64 rng(3);
  const auto Q = build_metric(random_psd(rng, 6, 4));
  for (int i = 0; i < 100; ++i) {
    const Vector x = rng.normal_vector(6);
    const double direct = x.dot(Q.matrix() * x);
    EXPECT_GE(Q.norm_sq(x), 0.0);
    EXPECT_NEAR(Q.norm_sq(x), std::max(direct, 0.0), 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

// ---- pinv_apply / range_project ------------------------------------------------

TEST(PinvApply, Examples) {
  EXPECT_TRUE(build_metric(mat2(2, 0, 0, 0)).pinv_apply(vec({4, 6})).isApprox(vec({2, 0})));
  const Vector y = vec({0.3, -1.2});
  EXPECT_TRUE(build_metric(Matrix::Identity(2, 2)).pinv_apply(y).isApprox(y, 1e-15));
  EXPECT_LT((build_metric(mat2(1, 1, 1, 1)).pinv_apply(vec({1, 1})) - vec({0.5, 0.5})).norm(), 1e-15);
}

TEST(RangeProject, Examples) {
  EXPECT_TRUE(build_metric(mat2(1, 0, 0, 0)).range_project(vec({3, 4})).isApprox(vec({3, 0})));
  const auto Q = build_metric(mat2(1, 1, 1, 1));
  EXPECT_LT((Q.range_project(vec({1, 0})) - vec({0.5, 0.5})).norm(), 1e-15);
  EXPECT_LT((Q.range_project(vec({2, 2})) - vec({2, 2})).norm(), 1e-15);
}

TEST(PinvApply, BlockVectorForm) {
  const auto Q = build_metric(mat2(2, 0, 0, 0));
  const BlockVector y = BlockVector::from_blocks({{"a", vec({4})}, {"b", vec({6})}});
  const BlockVector p = pinv_apply(Q, y);
  EXPECT_EQ(p.layout(), y.layout());
  EXPECT_TRUE(p.flatten().isApprox(vec({2, 0})));
  EXPECT_TRUE(range_project(Q, y).flatten().isApprox(vec({4, 0})));
}

TEST(MetricProperties, PinvRangeAndNuBound) {
  SplitMix64 rng(5);
  for (Index r : {1, 3, 5}) {
    const auto Q = build_metric(random_psd(rng, 5, r));
    for (int i = 0; i < 100; ++i) {
      const Vector x = rng.normal_vector(5);
      const Vector px = Q.range_project(x);
      // Q Q^dagger = projector onto ran Q.
      EXPECT_LT((Q.pinv_apply(Q.apply(x)) - px).norm(), 1e-10 * (1 + x.norm()));
      EXPECT_LT((Q.apply(Q.pinv_apply(x)) - px).norm(), 1e-10 * (1 + x.norm()));
      // Idempotence.
      EXPECT_LT((Q.range_project(px) - px).norm(), 1e-12 * (1 + x.norm()));
      // ||Q r|| >= nu ||r|| on ran Q.
      EXPECT_GE(Q.apply(px).norm() - Q.nu() * px.norm(), -1e-10);
    }
  }
}

TEST(MetricProperties, SqrtSquaresToQ) {
  SplitMix64 rng(8);
  const auto Q = build_metric(random_psd(rng, 4, 2));
  const Vector x = rng.normal_vector(4);
  EXPECT_LT((Q.sqrt_apply(Q.sqrt_apply(x)) - Q.apply(x)).norm(), 1e-12);
}

// ---- verify_fact_f1 ---------------------------------------------------------

namespace {

std::vector<std::pair<Vector, Vector>> sample_pairs(SplitMix64& rng, Index n, int count) {
  std::vector<std::pair<Vector, Vector>> out;
  for (int i = 0; i < count; ++i) {
    Vector a = rng.normal_vector(n);
    Vector b = rng.normal_vector(n);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

void expect_all_pass(const CheckReport& r) {
  EXPECT_TRUE(r.passed());
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << " slack " << c.worst_slack;
}

}  // namespace

TEST(FactF1, ZeroMap) {
  SplitMix64 rng(1);
  const auto Q = build_metric(mat2(1, 0, 0, 0));
  const auto rep = verify_fact_f1(Q, CocoerciveMap::zero(), sample_pairs(rng, 2, 20), {0.5, 1, 2});
  expect_all_pass(rep);
  ASSERT_NE(rep.find("fact_f1_i"), nullptr);
  // Both sides vanish for B = 0, so the first two inequalities are tight.
  EXPECT_EQ(rep.find("fact_f1_i")->worst_slack, 0.0);
}

TEST(FactF1, DegenerateExamplePair) {
  // Q = diag(1, 0), B(a, b) = (a, 0).
  SplitMix64 rng(2);
  const auto Q = build_metric(mat2(1, 0, 0, 0));
  const auto B = CocoerciveMap::linear(mat2(1, 0, 0, 0));
  expect_all_pass(verify_fact_f1(Q, B, sample_pairs(rng, 2, 100), {0.1, 0.5, 1, 4}));
}

TEST(FactF1, RandomCompatibleMap) {
  SplitMix64 rng(42);
  const Matrix Qm = random_psd(rng, 6, 4);
  const auto Q = build_metric(Qm);
  const Matrix W = random_psd(rng, 6, 6);
  const auto B = CocoerciveMap::linear(Qm * W * Qm);  // ran B inside ran Q
  const auto rep = verify_fact_f1(Q, B, sample_pairs(rng, 6, 100), {0.1, 0.5, 1, 2, 10}, 1e-10);
  expect_all_pass(rep);
  for (const auto& c : rep.checks) EXPECT_GE(c.worst_slack, -1e-10) << c.name;
}

TEST(FactF1, IndependentEvaluationAgrees) {
  // Recompute (i)-(iii) directly for one sample and compare with the reported bound.
  SplitMix64 rng(9);
  const Matrix Qm = random_psd(rng, 4, 3);
  const auto Q = build_metric(Qm);
  const Matrix L = Qm * Qm;
  const auto B = CocoerciveMap::linear(L);
  const auto pairs = sample_pairs(rng, 4, 1);
  const Vector bx = L * pairs[0].first;
  const Vector& y = pairs[0].second;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Qm);
  const Vector qdb = cod.pseudoInverse() * bx;
  const double qdb_q = std::sqrt(qdb.dot(Qm * qdb));
  const double y_q = std::sqrt(y.dot(Qm * y));
  const double slack_i = bx.squaredNorm() - Q.nu() * qdb_q * qdb_q;
  const double slack_ii = qdb_q * y_q - bx.dot(y);
  const auto rep = verify_fact_f1(Q, B, pairs, {1.0});
  EXPECT_NEAR(rep.find("fact_f1_i")->worst_slack, slack_i, 1e-9 * (1 + std::abs(slack_i)));
  EXPECT_NEAR(rep.find("fact_f1_ii")->worst_slack, slack_ii, 1e-9 * (1 + std::abs(slack_ii)));
}

TEST(FactF1, RangeViolation) {
  SplitMix64 rng(3);
  const auto Q = build_metric(mat2(1, 0, 0, 0));
  const auto B = CocoerciveMap::linear(Matrix::Identity(2, 2));
  expect_error(ErrorCode::RangeViolation, [&] { verify_fact_f1(Q, B, sample_pairs(rng, 2, 10), {1.0}); });
}

// ---- psd_certificate ----------------------------------------------------------

TEST(PsdCertificate, Examples) {
  Matrix d = Matrix::Zero(3, 3);
  d(2, 2) = 1;
  auto c = psd_certificate(d);
  EXPECT_TRUE(c.is_psd);
  EXPECT_NEAR(c.min_eigenvalue, 0.0, 1e-15);

  c = psd_certificate(mat2(1, 2, 2, 1));
  EXPECT_FALSE(c.is_psd);
  EXPECT_NEAR(c.min_eigenvalue, -1.0, 1e-14);
}

TEST(PsdCertificate, RelaxedAdmmG) {
  // G = blkdiag(0, 0, ((2 - gamma)/tau) I) with gamma = 1.5, tau = 1.
  Matrix G = Matrix::Zero(6, 6);
  G.bottomRightCorner(2, 2) = 0.5 * Matrix::Identity(2, 2);
  EXPECT_TRUE(psd_certificate(G).is_psd);
}

TEST(PsdCertificate, SymmetrizesAndRejectsNonSquare) {
  // Skew part is ignored: (M + M^T)/2 = I.
  EXPECT_TRUE(psd_certificate(mat2(1, 5, -5, 1)).is_psd);
  expect_error(ErrorCode::NonSquare, [] { psd_certificate(Matrix::Zero(2, 3)); });
}

// ---- BlockVector and matrix text format --------------------------------------

TEST(BlockVectorTest, LayoutAndRoundTrip) {
  const BlockVector x = BlockVector::from_blocks({{"u", vec({1, 2})}, {"v", vec({3})}, {"p", vec({4, 5, 6})}});
  EXPECT_EQ(x.total_dim(), 6);
  EXPECT_EQ(x.layout().num_blocks(), 3);
  EXPECT_TRUE(Vector(x.block("p")).isApprox(vec({4, 5, 6}), 0.0));
  const BlockVector y = unflatten(x.layout(), x.flatten());
  EXPECT_EQ(y.flatten(), x.flatten());
  const auto blocks = y.blocks();
  ASSERT_EQ(blocks.size(), 3u);
  EXPECT_EQ(blocks[1].first, "v");
  EXPECT_EQ(blocks[1].second, vec({3}));
}

TEST(BlockVectorTest, Errors) {
  expect_error(ErrorCode::DimensionMismatch, [] { BlockLayout({{"a", 1}, {"a", 2}}); });
  expect_error(ErrorCode::DimensionMismatch, [] { unflatten(BlockLayout::single(3), vec({1, 2})); });
  expect_error(ErrorCode::DimensionMismatch, [] { BlockLayout::single(2).index_of("zz"); });
}

TEST(MatrixIo, RoundTripIsExact) {
  SplitMix64 rng(4);
  const Matrix m = rng.normal_matrix(3, 5);
  std::stringstream ss;
  write_matrix(ss, m);
  std::string first;
  std::getline(ss, first);
  EXPECT_EQ(first, "3 5");
  ss.seekg(0);
  EXPECT_EQ(read_matrix(ss), m);
}

TEST(MatrixIo, BadInput) {
  std::stringstream bad("2 2\n1 2\n3");
  expect_error(ErrorCode::ConfigError, [&] { read_matrix(bad); });
  std::stringstream header("x y");
  expect_error(ErrorCode::ConfigError, [&] { read_matrix(header); });
}
