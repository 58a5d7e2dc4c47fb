#include <gtest/gtest.h>

#include <cmath>

#include "gfbs/engine.hpp"
#include "gfbs/operators.hpp"
#include "gfbs/prox.hpp"
#include "gfbs/zoo.hpp"
#include "helpers.hpp"

using namespace gfbs;
using gfbs::testing::expect_error;
using gfbs::testing::random_psd;
using gfbs::testing::vec;

namespace {

// Nonnegative-orthant indicator through the callback escape hatch.
ProxFunction nonneg_custom() {
  ProxFunction::CustomCallbacks cb;
  cb.prox = [](double, const Vector& y) -> Vector { return y.cwiseMax(0.0); };
  cb.value = [](const Vector& x) { return (x.array() >= 0).all() ? 0.0 : INFINITY; };
  cb.subgradient_residual = [](const Vector& x, const Vector& g) {
    // g in N(x): g_i <= 0, and g_i = 0 where x_i > 0.
    double r = 0.0;
    for (Index i = 0; i < x.size(); ++i) r += std::pow(x(i) > 0 ? g(i) : std::max(g(i), 0.0), 2);
    return std::sqrt(r);
  };
  return ProxFunction::custom(cb, "nonneg");
}

std::vector<ProxFunction> catalog(Index n, SplitMix64& rng) {
  const Matrix P = random_psd(rng, n, n) + 0.1 * Matrix::Identity(n, n);
  return {ProxFunction::zero(),
          ProxFunction::l1(0.7),
          ProxFunction::squared_l2(rng.normal_vector(n), 2.0),
          ProxFunction::squared_l2(0.5, 1.0),
          ProxFunction::quadratic(P, rng.normal_vector(n)),
          ProxFunction::linear(rng.normal_vector(n)),
          ProxFunction::box(-Vector::Ones(n), 2.0 * Vector::Ones(n)),
          ProxFunction::box(-0.5, 0.5),
          nonneg_custom()};
}

}  // namespace

// ---- prox -------------------------------------------------------------------

TEST(Prox, Examples) {
  EXPECT_DOUBLE_EQ(prox(ProxFunction::l1(1), 1.0, vec({3}))(0), 2.0);
  const Vector y = vec({1.5, -2, 0});
  EXPECT_EQ(prox(ProxFunction::zero(), 3.7, y), y);
  EXPECT_DOUBLE_EQ(prox(ProxFunction::squared_l2(4.0, 1.0), 1.0, vec({2}))(0), 3.0);
}

TEST(Prox, SoftThresholdAndBox) {
  const Vector p = prox(ProxFunction::l1(1.0), 0.5, vec({2, -0.3, -1}));
  EXPECT_TRUE(p.isApprox(vec({1.5, 0, -0.5})));
  EXPECT_TRUE(prox(ProxFunction::box(-1, 1), 9.0, vec({3, -0.2, -7})).isApprox(vec({1, -0.2, -1})));
}

TEST(Prox, QuadraticAndLinearClosedForms) {
  SplitMix64 rng(1);
  const Matrix P = random_psd(rng, 3, 3);
  const Vector q = rng.normal_vector(3), y = rng.normal_vector(3);
  const double tau = 0.4;
  // argmin 1/2 x'Px + q'x + |x - y|^2 / (2 tau):  (tau P + I) x = y - tau q.
  const Vector expect = (tau * P + Matrix::Identity(3, 3)).ldlt().solve(y - tau * q);
  EXPECT_LT((prox(ProxFunction::quadratic(P, q), tau, y) - expect).norm(), 1e-12);
  const Vector c = rng.normal_vector(3);
  EXPECT_LT((prox(ProxFunction::linear(c), tau, y) - (y - tau * c)).norm(), 1e-15);
}

TEST(Prox, OptimalityResidualCertifiesEveryKind) {
  SplitMix64 rng(2);
  for (const auto& f : catalog(4, rng)) {
    for (double tau : {0.1, 1.0, 10.0}) {
      const Vector y = 3.0 * rng.normal_vector(4);
      const Vector p = prox(f, tau, y);
      EXPECT_LE(prox_optimality_residual(f, tau, y, p), 1e-8) << f.kind_name();
      EXPECT_TRUE(std::isfinite(f.value(p))) << f.kind_name();
    }
  }
}

TEST(Prox, Errors) {
  ProxFunction::CustomCallbacks cb;
  cb.value = [](const Vector&) { return 0.0; };
  const auto no_prox = ProxFunction::custom(cb, "noprox");
  expect_error(ErrorCode::UnsupportedKind, [&] { prox(no_prox, 1.0, vec({1})); });
  expect_error(ErrorCode::DimensionMismatch, [] { prox(ProxFunction::linear(vec({1, 2})), 1.0, vec({1})); });
}

TEST(Prox, SpecRoundTrip) {
  SplitMix64 rng(3);
  const Vector y = rng.normal_vector(4);
  for (const auto& f : catalog(4, rng)) {
    if (f.kind() == ProxFunction::Kind::Custom) {
      expect_error(ErrorCode::UnsupportedKind, [&] { f.to_spec(); });
      continue;
    }
    const auto g = ProxFunction::parse_spec(f.to_spec());
    EXPECT_EQ(g.kind(), f.kind());
    EXPECT_EQ(prox(g, 0.7, y), prox(f, 0.7, y)) << f.to_spec();
  }
  expect_error(ErrorCode::ConfigError, [] { ProxFunction::parse_spec("l1"); });
  expect_error(ErrorCode::ConfigError, [] { ProxFunction::parse_spec(""); });
}

// ---- prox_conjugate -----------------------------------------------------------

TEST(ProxConjugate, Examples) {
  EXPECT_DOUBLE_EQ(prox_conjugate(ProxFunction::l1(1), 1.0, vec({3}))(0), 1.0);
  EXPECT_EQ(prox_conjugate(ProxFunction::zero(), 2.0, vec({3, -4})), vec({0, 0}));
  EXPECT_DOUBLE_EQ(prox_conjugate(ProxFunction::squared_l2(0.0, 1.0), 1.0, vec({2}))(0), 1.0);
}

TEST(ProxConjugate, IndependentClosedForms) {
  SplitMix64 rng(4);
  const Vector y = 3.0 * rng.normal_vector(5);
  for (double s : {0.1, 1.0, 10.0}) {
    // (lambda |.|_1)^* = indicator of [-lambda, lambda]^n.
    EXPECT_LT((prox_conjugate(ProxFunction::l1(0.7), s, y) - y.cwiseMax(-0.7).cwiseMin(0.7)).norm(), 1e-12);
    // (w/2 |x - c|^2)^* (z) = |z|^2/(2w) + <c, z>.
    const Vector c = rng.normal_vector(5);
    const double w = 2.0;
    EXPECT_LT((prox_conjugate(ProxFunction::squared_l2(c, w), s, y) - (y - s * c) / (1.0 + s / w)).norm(), 1e-12);
    // <c, .>^* = indicator of {c}.
    EXPECT_LT((prox_conjugate(ProxFunction::linear(c), s, y) - c).norm(), 1e-12);
  }
}

TEST(ProxProperties, FirmNonexpansiveAndMoreau) {
  SplitMix64 rng(5);
  for (const auto& f : catalog(4, rng)) {
    for (double tau : {0.1, 1.0, 10.0}) {
      for (int i = 0; i < 100; ++i) {
        const Vector y1 = 2.0 * rng.normal_vector(4), y2 = 2.0 * rng.normal_vector(4);
        const Vector d = prox(f, tau, y1) - prox(f, tau, y2);
        EXPECT_GE(d.dot(y1 - y2) - d.squaredNorm(), -1e-10) << f.kind_name();
        // prox_{s f^*}(y) + s prox_{f/s}(y/s) = y
        const Vector m = prox_conjugate(f, tau, y1) + tau * prox(f, 1.0 / tau, y1 / tau);
        EXPECT_LE((m - y1).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, y1.cwiseAbs().maxCoeff())) << f.kind_name();
      }
    }
  }
}

// ---- cocoercivity_check -----------------------------------------------------------

namespace {
std::vector<std::pair<Vector, Vector>> pairs_of(SplitMix64& rng, Index n, int count) {
  std::vector<std::pair<Vector, Vector>> out;
  for (int i = 0; i < count; ++i) {
    Vector a = rng.normal_vector(n);
    Vector b = rng.normal_vector(n);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}
}  // namespace

TEST(Cocoercivity, ScalarGradientIsTight) {
  SplitMix64 rng(6);
  const double beta = 3.0;
  const auto B = CocoerciveMap::linear(beta * Matrix::Identity(1, 1));
  EXPECT_DOUBLE_EQ(B.beta, beta);
  const auto rep = cocoercivity_check(B, pairs_of(rng, 1, 50));
  EXPECT_TRUE(rep.passed());
  EXPECT_NEAR(rep.find("cocoercive")->worst_slack, 0.0, 1e-12);
}

TEST(Cocoercivity, ZeroMapVacuous) {
  SplitMix64 rng(7);
  const auto rep = cocoercivity_check(CocoerciveMap::zero(), pairs_of(rng, 3, 5));
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(CocoerciveMap::zero()(vec({1, 2})).isZero());
}

TEST(Cocoercivity, DegenerateQBased) {
  SplitMix64 rng(8);
  Matrix L = Matrix::Zero(2, 2);
  L(0, 0) = 1.0;
  const auto Q = build_metric(L);  // Q = diag(1, 0), B(a, b) = (a, 0)
  const auto rep = cocoercivity_check(CocoerciveMap::linear(L), pairs_of(rng, 2, 100), &Q);
  EXPECT_TRUE(rep.passed());
  ASSERT_NE(rep.find("q_cocoercive"), nullptr);
  EXPECT_TRUE(rep.find("q_cocoercive")->passed);
}

TEST(Cocoercivity, UnderstatedBetaFails) {
  SplitMix64 rng(9);
  auto B = CocoerciveMap::linear(4.0 * Matrix::Identity(2, 2));
  B.beta = 1.0;  // true constant is 4
  EXPECT_FALSE(cocoercivity_check(B, pairs_of(rng, 2, 10)).passed());
}

// ---- MonotoneBlockOperator / inclusion_residual ------------------------------------

TEST(InclusionResidual, ExactProxStepAndPerturbation) {
  // A = d|.|_1, B = 0, Q = I: x~ = prox(x), selection = x - x~.
  const MonotoneBlockOperator A(BlockLayout::single(3), {BlockTerm::of(ProxFunction::l1(1.0))}, Matrix());
  const Vector x = vec({3, -0.4, -2});
  const Vector xt = prox(ProxFunction::l1(1.0), 1.0, x);
  EXPECT_LE(inclusion_residual(A, xt, x - xt), 1e-10);
  for (Index i = 0; i < 3; ++i) {
    Vector xp = xt;
    xp(i) += 1e-3;
    // Re-derive the selection Q(x - x~) - Bx at the perturbed point.
    EXPECT_GT(inclusion_residual(A, xp, x - xp), 1e-4);
  }
}

TEST(InclusionResidual, ZeroOperatorGivesSelectionNorm) {
  const MonotoneBlockOperator A(BlockLayout::single(2), {BlockTerm::of(ProxFunction::zero())}, Matrix());
  const Vector sel = vec({3, 4});
  EXPECT_DOUBLE_EQ(inclusion_residual(A, vec({1, 1}), sel), 5.0);
  expect_error(ErrorCode::DimensionMismatch, [&] { inclusion_residual(A, vec({1}), sel); });
}

TEST(MonotoneBlockOperatorTest, RejectsBadCoupling) {
  Matrix K = Matrix::Zero(2, 2);
  K(0, 1) = 1.0;  // not antisymmetric
  const BlockLayout L({{"a", 1}, {"b", 1}});
  const std::vector<BlockTerm> terms = {BlockTerm::of(ProxFunction::zero()), BlockTerm::of(ProxFunction::zero())};
  expect_error(ErrorCode::NotSymmetric, [&] { MonotoneBlockOperator(L, terms, K); });
  expect_error(ErrorCode::DimensionMismatch,
               [&] { MonotoneBlockOperator(L, {BlockTerm::of(ProxFunction::zero())}, Matrix()); });
  Matrix E = Matrix::Zero(2, 2);
  E(0, 0) = -1.0;
  EXPECT_FALSE(MonotoneBlockOperator(L, terms, Matrix(), E).extra_linear_psd());
}

TEST(MonotoneBlockOperatorTest, SkewAndAssembledMonotonicityAcrossZoo) {
  SplitMix64 rng(10);
  for (auto name : all_algorithms()) {
    const auto kind = default_problem(name);
    const auto pb = generate(kind, 1, default_dims(kind));
    const auto fit = build(name, pb, default_params(name, pb), BuildOptions{false});
    const SplittingModel& m = fit.engine();
    const Index n = m.dim();
    for (int i = 0; i < 100; ++i) {
      const Vector x = rng.normal_vector(n);
      EXPECT_NEAR(x.dot(m.A().skew() * x), 0.0, 1e-12 * std::max(1.0, x.squaredNorm())) << algorithm_name(name);
    }
    // Pairs (x~, a) with a = Q(x - x~) - Bx in A(x~) from exact steps.
    for (int i = 0; i < 20; ++i) {
      const Vector x1 = rng.normal_vector(n), x2 = rng.normal_vector(n);
      const Vector t1 = gfbs_step(m, x1), t2 = gfbs_step(m, x2);
      const Vector a1 = m.Q_raw() * (x1 - t1) - m.B()(x1);
      const Vector a2 = m.Q_raw() * (x2 - t2) - m.B()(x2);
      EXPECT_GE((a1 - a2).dot(t1 - t2), -1e-10 * std::max(1.0, (t1 - t2).squaredNorm())) << algorithm_name(name);
    }
  }
}
