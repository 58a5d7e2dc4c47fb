// Relaxed-ADMM and proximal-ADMM on min f(u) + g(v) s.t. Au + Bv = c with
// quadratic f, g; state x = (u, v, p).
#include <Eigen/QR>
#include <cmath>
#include <limits>

#include "gfbs/errors.hpp"
#include "gfbs/zoo.hpp"

namespace gfbs::zoo_detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TwoBlockData {
  Matrix P, R, A, B;
  Vector q, r, c;
  Index n, p, m;

  explicit TwoBlockData(const ProblemInstance& pb)
      : P(pb.mat("P")), R(pb.mat("R")), A(pb.mat("A")), B(pb.mat("B")), q(pb.vec("q")), r(pb.vec("r")),
        c(pb.vec("c")), n(P.rows()), p(R.rows()), m(A.rows()) {}
};

MonotoneBlockOperator two_block_operator(const TwoBlockData& d, const BlockLayout& layout) {
  const Index N = d.n + d.p + d.m;
  Matrix L = Matrix::Zero(N, N);
  L.block(0, d.n + d.p, d.n, d.m) = -d.A.transpose();
  L.block(d.n, d.n + d.p, d.p, d.m) = -d.B.transpose();
  L.block(d.n + d.p, 0, d.m, d.n) = d.A;
  L.block(d.n + d.p, d.n, d.m, d.p) = d.B;
  std::vector<BlockTerm> terms = {BlockTerm::of(ProxFunction::quadratic(d.P, d.q)),
                                  BlockTerm::of(ProxFunction::quadratic(d.R, d.r)),
                                  BlockTerm::of(ProxFunction::linear(-d.c))};
  return MonotoneBlockOperator(layout, std::move(terms), L);
}

Vector least_norm(const Matrix& K, const Vector& rhs) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
  return cod.solve(rhs);
}

void attach_common(AlgorithmFitting& fit, const ProblemInstance& pb, const TwoBlockData& d) {
  const Index n = d.n, p = d.p, m = d.m;
  const ProblemInstance problem = pb;
  fit.kkt = [problem, n, p, m](const Vector& x) {
    return kkt_residual(problem, x.head(n + p), x.segment(n + p, m));
  };
  fit.feasibility = [d](const Vector& x) {
    return (d.A * x.head(d.n) + d.B * x.segment(d.n, d.p) - d.c).norm();
  };
  fit.dual_block = "p";
  const OracleSolution sol = oracle_solve(pb);
  fit.x_star.resize(n + p + m);
  fit.x_star << sol.x_star, sol.dual;
}

AlgorithmFitting relaxed_admm(const ProblemInstance& pb, const ParamMap& prm) {
  const TwoBlockData d(pb);
  const double tau = param(prm, "tau"), gamma = param(prm, "gamma");
  const BlockLayout layout({{"u", d.n}, {"v", d.p}, {"p", d.m}});
  const Index N = d.n + d.p + d.m, iv = d.n, ip = d.n + d.p;

  Matrix Q = Matrix::Zero(N, N);
  Q.block(iv, iv, d.p, d.p) = tau * d.B.transpose() * d.B;
  Q.block(iv, ip, d.p, d.m) = (1.0 - gamma) * d.B.transpose();
  Q.block(ip, iv, d.m, d.p) = -d.B;
  Q.block(ip, ip, d.m, d.m) = Matrix::Identity(d.m, d.m) / tau;
  Matrix M = Matrix::Identity(N, N);
  M.block(ip, iv, d.m, d.p) = -tau * d.B;
  M.block(ip, ip, d.m, d.m) *= gamma;

  ModelOptions opts;
  opts.g_form = GForm::Degenerate;
  opts.declared_eta = 2.0 / gamma - 1.0;

  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(two_block_operator(d, layout), CocoerciveMap::zero(), Q,
                                               Relaxation::op(M), opts);
  fit.admissible.ranges = {{"tau", tau, 0.0, kInf, "0 < tau"}, {"gamma", gamma, 0.0, 2.0, "0 < gamma < 2"}};
  attach_common(fit, pb, d);
  // x^0 is arbitrary, so B'p^0 in dg(v^0) may fail; every later iterate satisfies it.
  fit.trace_start = 1;

  // Textbook relaxed ADMM with least-norm u-selection.
  const Matrix Ku = d.P + tau * d.A.transpose() * d.A;
  const Matrix Kv = d.R + tau * d.B.transpose() * d.B;
  fit.make_native = [d, tau, gamma, Ku, Kv]() -> std::unique_ptr<NativeIterator> {
    auto step = [d, tau, gamma, Ku, Kv](const Vector& x) {
      const Vector v = x.segment(d.n, d.p), p = x.tail(d.m);
      const Vector u1 = least_norm(Ku, -d.q + tau * d.A.transpose() * (d.c - d.B * v + p / tau));
      const Vector viol = d.A * u1 + d.B * v - d.c;
      const Vector v1 = least_norm(Kv, -d.r + tau * d.B.transpose() * (d.B * v - gamma * viol + p / tau));
      const Vector p1 = p - tau * d.B * (v1 - v) - tau * gamma * viol;
      Vector out(x.size());
      out << u1, v1, p1;
      return out;
    };
    auto id = [](const Vector& x) { return x; };
    return std::make_unique<LambdaNative>(id, step, id);
  };

  // <p^k - p^{k+1}, B(v^k - v^{k+1})> >= 0 along the trace (from the first
  // iterate produced by the v-update).
  fit.extra_checks = [d](const IterationTrace& trace) {
    CertificateReport rep;
    SlackTracker t("admm_inner_product", 1e-10);
    for (std::size_t k = 0; k + 1 < trace.states.size(); ++k) {
      const Vector& a = trace.states[k];
      const Vector& b = trace.states[k + 1];
      const Vector dp = a.tail(d.m) - b.tail(d.m);
      const Vector dv = a.segment(d.n, d.p) - b.segment(d.n, d.p);
      t.observe_slack(dp.dot(d.B * dv), static_cast<long>(k));
    }
    rep.add(t.result());
    return rep;
  };
  return fit;
}

AlgorithmFitting proximal_admm(const ProblemInstance& pb, const ParamMap& prm) {
  const TwoBlockData d(pb);
  const double tau = param(prm, "tau"), p1 = param(prm, "p1"), p2 = param(prm, "p2");
  const BlockLayout layout({{"u", d.n}, {"v", d.p}, {"p", d.m}});
  const Index N = d.n + d.p + d.m, iv = d.n, ip = d.n + d.p;

  Matrix Q = Matrix::Zero(N, N);
  Q.block(0, 0, d.n, d.n) = p1 * Matrix::Identity(d.n, d.n);
  Q.block(iv, iv, d.p, d.p) = p2 * Matrix::Identity(d.p, d.p) + tau * d.B.transpose() * d.B;
  Q.block(ip, iv, d.m, d.p) = -d.B;
  Q.block(ip, ip, d.m, d.m) = Matrix::Identity(d.m, d.m) / tau;
  Matrix M = Matrix::Identity(N, N);
  M.block(ip, iv, d.m, d.p) = -tau * d.B;

  ModelOptions opts;
  opts.g_form = GForm::Degenerate;
  AlgorithmFitting fit;
  auto model = std::make_shared<SplittingModel>(two_block_operator(d, layout), CocoerciveMap::zero(), Q,
                                                Relaxation::op(M), opts);
  // S and G are positive definite here, so the best eta is a generalized eigenvalue.
  if (p1 > 0.0 && p2 > 0.0 && tau > 0.0) {
    opts.declared_eta = generalized_min_eig(model->H(), model->S_raw());
    model = std::make_shared<SplittingModel>(two_block_operator(d, layout), CocoerciveMap::zero(), Q,
                                             Relaxation::op(M), opts);
  }
  fit.model = model;
  fit.admissible.ranges = {{"tau", tau, 0.0, kInf, "0 < tau"},
                           {"p1", p1, 0.0, kInf, "P1 = p1 I positive definite"},
                           {"p2", p2, 0.0, kInf, "P2 = p2 I positive definite"}};
  attach_common(fit, pb, d);

  const Matrix Ku = d.P + p1 * Matrix::Identity(d.n, d.n) + tau * d.A.transpose() * d.A;
  const Matrix Kv = d.R + p2 * Matrix::Identity(d.p, d.p) + tau * d.B.transpose() * d.B;
  fit.make_native = [d, tau, p1, p2, Ku, Kv]() -> std::unique_ptr<NativeIterator> {
    auto step = [d, tau, p1, p2, Ku, Kv](const Vector& x) {
      const Vector u = x.head(d.n), v = x.segment(d.n, d.p), p = x.tail(d.m);
      const Vector u1 = least_norm(Ku, p1 * u - d.q + d.A.transpose() * p - tau * d.A.transpose() * (d.B * v - d.c));
      const Vector v1 =
          least_norm(Kv, p2 * v - d.r + d.B.transpose() * p - tau * d.B.transpose() * (d.A * u1 - d.c));
      const Vector pn = p - tau * (d.A * u1 + d.B * v1 - d.c);
      Vector out(x.size());
      out << u1, v1, pn;
      return out;
    };
    auto id = [](const Vector& x) { return x; };
    return std::make_unique<LambdaNative>(id, step, id);
  };
  return fit;
}

}  // namespace

AlgorithmFitting build_admm(AlgorithmName name, const ProblemInstance& pb, const ParamMap& p) {
  if (name == AlgorithmName::RelaxedADMM) return relaxed_admm(pb, p);
  return proximal_admm(pb, p);
}

}  // namespace gfbs::zoo_detail
