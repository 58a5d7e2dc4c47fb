// Lagrangian methods for min h(u) s.t. Au = c with quadratic h (EqualityQP):
// ALM, linearized ALM and linearized Bregman; state x = (u, s).
#include <Eigen/QR>
#include <limits>

#include "gfbs/errors.hpp"
#include "gfbs/matrix_io.hpp"
#include "gfbs/zoo.hpp"

namespace gfbs::zoo_detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct QpData {
  Matrix P, A;
  Vector q, c;
  Index n, m;
  ProxFunction h;

  explicit QpData(const ProblemInstance& pb)
      : P(pb.mat("P")), A(pb.mat("A")), q(pb.vec("q")), c(pb.vec("c")), n(P.rows()), m(A.rows()),
        h(ProxFunction::quadratic(pb.mat("P"), pb.vec("q"))) {}
};

Matrix skew_of(const QpData& d) {
  Matrix L = Matrix::Zero(d.n + d.m, d.n + d.m);
  L.topRightCorner(d.n, d.m) = -d.A.transpose();
  L.bottomLeftCorner(d.m, d.n) = d.A;
  return L;
}

Matrix blkdiag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

std::unique_ptr<NativeIterator> identity_native(LambdaNative::Map step) {
  auto id = [](const Vector& x) { return x; };
  return std::make_unique<LambdaNative>(id, std::move(step), id);
}

// Reference, KKT and feasibility against `target` (the problem whose KKT point
// the iteration converges to).
void attach_reference(AlgorithmFitting& fit, const ProblemInstance& target, const QpData& d) {
  const OracleSolution sol = oracle_solve(target);
  fit.x_star.resize(d.n + d.m);
  fit.x_star << sol.x_star, sol.dual;
  const Index n = d.n, m = d.m;
  fit.kkt = [target, n, m](const Vector& x) { return kkt_residual(target, x.head(n), x.tail(m)); };
  fit.feasibility = [d](const Vector& x) { return (d.A * x.head(d.n) - d.c).norm(); };
  fit.dual_block = "s";
}

AlgorithmFitting alm(const ProblemInstance& pb, const ParamMap& prm) {
  const QpData d(pb);
  const double tau = param(prm, "tau");
  const BlockLayout layout({{"u", d.n}, {"s", d.m}});
  MonotoneBlockOperator op(layout, {BlockTerm::of(d.h), BlockTerm::of(ProxFunction::linear(-d.c))}, skew_of(d));
  const Matrix Q = blkdiag(Matrix::Zero(d.n, d.n), Matrix::Identity(d.m, d.m) / tau);

  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(op, CocoerciveMap::zero(), Q);
  fit.admissible.ranges = {{"tau", tau, 0.0, kInf, "0 < tau"}};
  attach_reference(fit, pb, d);

  // u-step: least-norm minimizer of h(u) + tau/2 ||Au - c - s/tau||^2.
  const Matrix Ku = d.P + tau * d.A.transpose() * d.A;
  fit.make_native = [d, tau, Ku]() {
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Ku);
    return identity_native([d, tau, cod](const Vector& x) {
      const Vector s = x.tail(d.m);
      const Vector u1 = cod.solve(Vector(-d.q + d.A.transpose() * s + tau * d.A.transpose() * d.c));
      Vector out(x.size());
      out << u1, s - tau * (d.A * u1 - d.c);
      return out;
    });
  };
  return fit;
}

AlgorithmFitting linearized_alm(const ProblemInstance& pb, const ParamMap& prm) {
  const QpData d(pb);
  const double tau = param(prm, "tau"), rho = param(prm, "rho");
  const BlockLayout layout({{"u", d.n}, {"s", d.m}});
  MonotoneBlockOperator op(layout, {BlockTerm::of(d.h), BlockTerm::of(ProxFunction::linear(-d.c))}, skew_of(d));
  const Matrix Q = blkdiag(rho * Matrix::Identity(d.n, d.n) - tau * d.A.transpose() * d.A,
                           Matrix::Identity(d.m, d.m) / tau);

  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(op, CocoerciveMap::zero(), Q);
  const double a2 = spectral_norm_sq(d.A);
  fit.admissible.ranges = {{"rho", rho, 0.0, kInf, "0 < rho"},
                           {"tau", tau, 0.0, rho / a2, "0 < tau < rho/||A'A||"}};
  attach_reference(fit, pb, d);

  fit.make_native = [d, tau, rho]() {
    return identity_native([d, tau, rho](const Vector& x) {
      const Vector u = x.head(d.n), s = x.tail(d.m);
      const Vector u1 = prox(d.h, 1.0 / rho, u - d.A.transpose() * (tau * (d.A * u - d.c) - s) / rho);
      Vector out(x.size());
      out << u1, s - tau * (d.A * u1 - d.c);
      return out;
    });
  };
  return fit;
}

// The u-block of A is tau d h~ + (1/rho) I - A'A with h~ = h + (1/tau)<., A'c>,
// the scaling under which the fitting reproduces the scheme exactly.
AlgorithmFitting linearized_bregman(const ProblemInstance& pb, const ParamMap& prm) {
  const QpData d(pb);
  const double tau = param(prm, "tau"), rho = param(prm, "rho");
  const BlockLayout layout({{"u", d.n}, {"s", d.m}});
  BlockTerm u_term = BlockTerm::of(d.h, tau);
  u_term.with_shift(d.A.transpose() * d.c);
  const Matrix extra = blkdiag(Matrix::Identity(d.n, d.n) / rho - d.A.transpose() * d.A, Matrix::Zero(d.m, d.m));
  MonotoneBlockOperator op(layout, {u_term, BlockTerm::of(ProxFunction::linear(-d.c))}, skew_of(d), extra);
  const Matrix Q = blkdiag(Matrix::Zero(d.n, d.n), Matrix::Identity(d.m, d.m));

  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(op, CocoerciveMap::zero(), Q);
  fit.admissible.ranges = {{"tau", tau, 0.0, kInf, "0 < tau"},
                           {"rho", rho, 0.0, 1.0 / spectral_norm_sq(d.A), "0 < rho < 1/||A'A||"}};
  fit.admissible.notes.push_back("tau is free; fixed points solve min tau h(u) + ||u||^2/(2 rho) s.t. Au = c");
  // Fixed points are KKT points of the regularized problem.
  const ProblemInstance target =
      make_equality_qp(tau * d.P + Matrix::Identity(d.n, d.n) / rho, tau * d.q, d.A, d.c);
  attach_reference(fit, target, d);

  fit.make_native = [d, tau, rho]() {
    return identity_native([d, tau, rho](const Vector& x) {
      const Vector s = x.tail(d.m);
      const Vector u1 = prox(d.h, rho * tau, rho * d.A.transpose() * s);
      Vector out(x.size());
      out << u1, s - (d.A * u1 - d.c);
      return out;
    });
  };
  return fit;
}

}  // namespace

AlgorithmFitting build_lagrangian(AlgorithmName name, const ProblemInstance& pb, const ParamMap& p) {
  switch (name) {
    case AlgorithmName::ALM:
      return alm(pb, p);
    case AlgorithmName::LinearizedALM:
      return linearized_alm(pb, p);
    default:
      return linearized_bregman(pb, p);
  }
}

}  // namespace gfbs::zoo_detail
