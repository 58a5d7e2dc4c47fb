#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gfbs/problem.hpp"
#include "gfbs/zoo.hpp"
#include "helpers.hpp"

using namespace gfbs;
using gfbs::testing::expect_error;
using gfbs::testing::vec;

namespace {

std::string serialize(const ProblemInstance& pb) {
  std::ostringstream os;
  write_instance(os, pb);
  return os.str();
}

void expect_same_instance(const ProblemInstance& a, const ProblemInstance& b, double tol) {
  EXPECT_EQ(a.kind, b.kind);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.dims.n, b.dims.n);
  EXPECT_EQ(a.dims.m, b.dims.m);
  EXPECT_EQ(a.dims.p, b.dims.p);
  EXPECT_NEAR(a.lambda, b.lambda, tol);
  ASSERT_EQ(a.data.size(), b.data.size());
  for (const auto& [name, m] : a.data) {
    ASSERT_TRUE(b.has(name)) << name;
    const Matrix& o = b.mat(name);
    ASSERT_EQ(m.rows(), o.rows()) << name;
    ASSERT_EQ(m.cols(), o.cols()) << name;
    EXPECT_LE((m - o).cwiseAbs().maxCoeff(), tol) << name;
  }
}

}  // namespace

// ---- generate -----------------------------------------------------------------

struct GoldenCase {
  const char* file;
  ProblemKind kind;
  std::uint64_t seed;
  ProblemDims dims;
};

class Golden : public ::testing::TestWithParam<GoldenCase> {};

TEST_P(Golden, MatchesRecordedInstance) {
  const auto& gc = GetParam();
  const ProblemInstance pb = generate(gc.kind, gc.seed, gc.dims);
  const std::string path = std::string(GFBS_GOLDEN_DIR) + "/" + gc.file;
  if (std::getenv("GFBS_UPDATE_GOLDEN")) {
    std::ofstream(path) << serialize(pb);
  }
  std::ifstream in(path);
  ASSERT_TRUE(in) << "missing golden file " << path;
  const ProblemInstance golden = read_instance(in);
  // Generation goes through QR factorizations; allow last-bit differences across platforms.
  expect_same_instance(pb, golden, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(ProblemBench, Golden,
                         ::testing::Values(GoldenCase{"equality_qp_seed0_n3_m1.txt", ProblemKind::EqualityQP, 0, {3, 1, 0}},
                                           GoldenCase{"lasso_seed7_n20_p50.txt", ProblemKind::Lasso, 7, {20, 0, 50}},
                                           GoldenCase{"tv1d_seed1_n64.txt", ProblemKind::TV1D, 1, {64, 0, 0}}),
                         [](const auto& info) {
                           std::string s = info.param.file;
                           return s.substr(0, s.find('.'));
                         });

TEST(Generate, DeterministicAndSeedSensitive) {
  for (ProblemKind k : {ProblemKind::EqualityQP, ProblemKind::Lasso, ProblemKind::TV1D, ProblemKind::TwoBlockADMM}) {
    const auto d = default_dims(k);
    EXPECT_EQ(serialize(generate(k, 5, d)), serialize(generate(k, 5, d)));
    EXPECT_NE(serialize(generate(k, 5, d)), serialize(generate(k, 6, d)));
  }
}

TEST(Generate, Invariants) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto qp = generate(ProblemKind::EqualityQP, seed, {10, 4, 0});
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(qp.mat("P")).eigenvalues().minCoeff(), 0.0);
    const Eigen::JacobiSVD<Matrix> svd(qp.mat("A"));
    EXPECT_EQ(svd.rank(), 4);
    const auto sv = svd.singularValues();
    EXPECT_GE(sv.minCoeff(), 0.1 - 1e-12);
    EXPECT_LE(sv.maxCoeff(), 10.0 + 1e-12);

    const auto lasso = generate(ProblemKind::Lasso, seed, {20, 0, 50});
    EXPECT_GT(lasso.lambda, 0.0);
    EXPECT_EQ(lasso.mat("M").rows(), 50);
    EXPECT_EQ(lasso.mat("M").cols(), 20);
    const auto tv = generate(ProblemKind::TV1D, seed, {16, 0, 0});
    EXPECT_GT(tv.lambda, 0.0);
    EXPECT_TRUE(tv.mat("D").isApprox(tv_difference(16)));
  }
}

TEST(Generate, Errors) {
  expect_error(ErrorCode::DimsTooLarge, [] { generate(ProblemKind::Lasso, 0, {1500, 0, 1500}); });
  expect_error(ErrorCode::ConfigError, [] { generate(ProblemKind::EqualityQP, 0, {0, 1, 0}); });
}

TEST(Serialization, RoundTripIsExact) {
  for (ProblemKind k : {ProblemKind::EqualityQP, ProblemKind::Lasso, ProblemKind::TV1D, ProblemKind::TwoBlockADMM}) {
    const auto pb = generate(k, 3, default_dims(k));
    std::istringstream in(serialize(pb));
    expect_same_instance(pb, read_instance(in), 0.0);
  }
  std::istringstream bad("gfbs-instance\nkind Lasso\nbogus 1\n");
  expect_error(ErrorCode::ConfigError, [&] { read_instance(bad); });
  std::istringstream truncated("gfbs-instance\nkind Lasso\n");
  expect_error(ErrorCode::ConfigError, [&] { read_instance(truncated); });
}

// ---- oracle_solve ----------------------------------------------------------------

TEST(Oracle, SymmetricQp) {
  Matrix A(1, 2);
  A << 1, 1;
  const auto pb = make_equality_qp(Matrix::Identity(2, 2), Vector::Zero(2), A, vec({2}));
  const auto sol = oracle_solve(pb);
  EXPECT_LE((sol.x_star - vec({1, 1})).norm(), 1e-14);
  EXPECT_LE(sol.kkt_residual, 1e-14);
}

TEST(Oracle, ScalarLassoIsSoftThreshold) {
  for (double b : {-2.5, -0.3, 0.0, 0.7, 4.0}) {
    const double lambda = 0.8;
    const auto sol = oracle_solve(make_lasso(Matrix::Identity(1, 1), vec({b}), lambda));
    const double expect = std::copysign(std::max(std::abs(b) - lambda, 0.0), b);
    EXPECT_NEAR(sol.x_star(0), expect, 1e-13) << b;
  }
}

TEST(Oracle, SeededInstancesMeetTolerance) {
  EXPECT_LE(oracle_solve(generate(ProblemKind::EqualityQP, 0, {10, 4, 0})).kkt_residual, 1e-12);
  for (ProblemKind k : {ProblemKind::Lasso, ProblemKind::TV1D, ProblemKind::TwoBlockADMM})
    for (std::uint64_t seed = 0; seed < 3; ++seed)
      EXPECT_LE(oracle_solve(generate(k, seed, default_dims(k))).kkt_residual, 1e-10) << problem_kind_name(k);
}

TEST(Oracle, BitForBitIdempotent) {
  for (ProblemKind k : {ProblemKind::EqualityQP, ProblemKind::Lasso, ProblemKind::TV1D, ProblemKind::TwoBlockADMM}) {
    const auto a = oracle_solve(generate(k, 4, default_dims(k)));
    const auto b = oracle_solve(generate(k, 4, default_dims(k)));
    EXPECT_EQ(a.x_star, b.x_star);
    EXPECT_EQ(a.dual, b.dual);
  }
}

TEST(Oracle, TvSatisfiesConventions) {
  const auto pb = generate(ProblemKind::TV1D, 2, {32, 0, 0});
  const auto sol = oracle_solve(pb);
  const Matrix& D = pb.mat("D");
  // u - b + D's = 0 and |s_i| <= lambda.
  EXPECT_LE((sol.x_star - pb.vec("b") + D.transpose() * sol.dual).norm(), 1e-10);
  EXPECT_LE(sol.dual.cwiseAbs().maxCoeff(), pb.lambda + 1e-10);
}

// ---- kkt_residual ----------------------------------------------------------------

TEST(Kkt, OracleSmallPerturbationLarge) {
  for (ProblemKind k : {ProblemKind::EqualityQP, ProblemKind::Lasso, ProblemKind::TV1D, ProblemKind::TwoBlockADMM}) {
    const auto pb = generate(k, 1, default_dims(k));
    const auto sol = oracle_solve(pb);
    EXPECT_LE(kkt_residual(pb, sol.x_star, sol.dual), 1e-10) << problem_kind_name(k);
    Vector x = sol.x_star;
    x(0) += 1e-3;
    EXPECT_GE(kkt_residual(pb, x, sol.dual), 1e-4) << problem_kind_name(k);
  }
}

TEST(Kkt, FeasibleSuboptimalIsStationarityDominated) {
  const auto pb = generate(ProblemKind::EqualityQP, 2, {10, 4, 0});
  const Matrix& A = pb.mat("A");
  const auto sol = oracle_solve(pb);
  // Move along the null space of A: still feasible, no longer optimal.
  const Eigen::FullPivLU<Matrix> lu(A);
  const Vector x = sol.x_star + lu.kernel().col(0);
  const auto t = kkt_terms(pb, x, sol.dual);
  EXPECT_LE(t.feasibility, 1e-12);
  EXPECT_GT(t.stationarity, 1e-3);
  EXPECT_GT(t.stationarity, 1e6 * t.feasibility);
}

TEST(Kkt, DimensionMismatch) {
  const auto pb = generate(ProblemKind::EqualityQP, 2, {10, 4, 0});
  expect_error(ErrorCode::DimensionMismatch, [&] { kkt_residual(pb, Vector::Zero(3), Vector::Zero(4)); });
}

// ---- zoo convergence to the oracle ---------------------------------------------------

TEST(Bench, EveryAlgorithmReachesOracleAccuracy) {
  for (auto name : all_algorithms()) {
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
      const auto kind = default_problem(name);
      const auto pb = generate(kind, seed, default_dims(kind));
      const auto fit = build(name, pb, default_params(name, pb));
      const auto tr = run(fit.engine(), initial_point(fit, seed), 100000, 1e-13, run_options(fit));
      ASSERT_FALSE(tr.kkt_residuals.empty());
      EXPECT_LE(fit.kkt(tr.states.back()), 1e-6) << algorithm_name(name) << " seed " << seed;
    }
  }
}
