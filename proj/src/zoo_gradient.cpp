// Single-block fittings with Q = I / tau: gradient descent, classical PPA,
// proximal FBS, and the dual proximal-gradient form of the Dykstra-like method.
#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <limits>

#include "gfbs/errors.hpp"
#include "gfbs/zoo.hpp"

namespace gfbs::zoo_detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smooth part f(x) = 1/2 x'Hx + g0'x + f0 of a Lasso or EqualityQP instance.
struct SmoothQuadratic {
  Matrix H;
  Vector g0;
  double f0 = 0.0;

  double value(const Vector& x) const { return 0.5 * x.dot(H * x) + g0.dot(x) + f0; }
  Vector grad(const Vector& x) const { return H * x + g0; }
};

SmoothQuadratic smooth_part(const ProblemInstance& pb) {
  if (pb.kind == ProblemKind::Lasso) {
    const Matrix& M = pb.mat("M");
    const Vector b = pb.vec("b");
    return {M.transpose() * M, -M.transpose() * b, 0.5 * b.squaredNorm()};
  }
  return {pb.mat("P"), pb.vec("q"), 0.0};
}

MonotoneBlockOperator single_block(Index n, BlockTerm term, const std::string& name = "x") {
  return MonotoneBlockOperator(BlockLayout::single(n, name), {std::move(term)}, Matrix::Zero(n, n));
}

Matrix scaled_identity(Index n, double s) { return s * Matrix::Identity(n, n); }

std::unique_ptr<NativeIterator> identity_native(LambdaNative::Map step) {
  auto id = [](const Vector& x) { return x; };
  return std::make_unique<LambdaNative>(id, std::move(step), id);
}

// f + indicator{Ax = c} for a quadratic f, proximable by one KKT solve.
ProxFunction constrained_quadratic(const ProblemInstance& pb) {
  const Matrix P = pb.mat("P"), A = pb.mat("A");
  const Vector q = pb.vec("q"), c = pb.vec("c");
  const Index n = P.rows(), m = A.rows();
  const double feas_tol = 1e-8 * (1.0 + c.norm());
  ProxFunction::CustomCallbacks cb;
  cb.prox = [P, A, q, c, n, m](double t, const Vector& y) {
    Matrix K = Matrix::Zero(n + m, n + m);
    K.topLeftCorner(n, n) = P + Matrix::Identity(n, n) / t;
    K.topRightCorner(n, m) = A.transpose();
    K.bottomLeftCorner(m, n) = A;
    Vector rhs(n + m);
    rhs << y / t - q, c;
    return Vector(Eigen::PartialPivLU<Matrix>(K).solve(rhs).head(n));
  };
  cb.value = [P, A, q, c, feas_tol](const Vector& x) {
    if ((A * x - c).norm() > feas_tol) return kInf;
    return 0.5 * x.dot(P * x) + q.dot(x);
  };
  // g - grad f(x) must lie in ran A'; x must be feasible.
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A.transpose());
  cb.subgradient_residual = [P, A, q, c, cod](const Vector& x, const Vector& g) {
    const Vector r = g - P * x - q;
    const Vector mult = cod.solve(r);
    return (r - A.transpose() * mult).norm() + (A * x - c).norm();
  };
  return ProxFunction::custom(std::move(cb), "quadratic_on_affine_set");
}

AlgorithmFitting gradient_descent(const ProblemInstance& pb, const ParamMap& prm) {
  const double tau = param(prm, "tau");
  const SmoothQuadratic f = smooth_part(pb);
  const Index n = f.H.rows();
  const CocoerciveMap B = CocoerciveMap::affine(f.H, f.g0);

  ModelOptions opts;
  opts.objective = Objective{[f](const Vector& x) { return f.value(x); }, [f](const Vector& x) { return f.value(x); },
                             [f](const Vector& x) { return f.grad(x); }};
  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(single_block(n, BlockTerm::of(ProxFunction::zero())), B,
                                               scaled_identity(n, 1.0 / tau), Relaxation::none(), opts);
  fit.admissible.ranges = {{"tau", tau, 0.0, 2.0 / B.beta, "0 < tau < 2/beta"}};
  fit.x_star = smooth_minimizer(pb);
  fit.kkt = [f](const Vector& x) { return f.grad(x).norm(); };
  fit.make_native = [f, tau]() { return identity_native([f, tau](const Vector& x) { return Vector(x - tau * f.grad(x)); }); };
  return fit;
}

AlgorithmFitting classical_ppa(const ProblemInstance& pb, const ParamMap& prm) {
  const double tau = param(prm, "tau"), gamma = param(prm, "gamma");
  const bool lasso = pb.kind == ProblemKind::Lasso;
  const Index n = pb.dims.n;
  const ProxFunction g = lasso ? ProxFunction::l1(pb.lambda) : constrained_quadratic(pb);

  ModelOptions opts;
  if (lasso) {
    opts.objective = Objective{[g](const Vector& x) { return g.value(x); }, nullptr, nullptr};
  } else {
    // Iterates are feasible up to rounding; the objective is read off f alone.
    const Matrix P = pb.mat("P");
    const Vector q = pb.vec("q");
    opts.objective = Objective{[P, q](const Vector& x) { return 0.5 * x.dot(P * x) + q.dot(x); }, nullptr, nullptr};
  }
  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(single_block(n, BlockTerm::of(g)), CocoerciveMap::zero(),
                                               scaled_identity(n, 1.0 / tau), Relaxation::scalar(gamma), opts);
  fit.admissible.ranges = {{"tau", tau, 0.0, kInf, "0 < tau"}, {"gamma", gamma, 0.0, 2.0, "0 < gamma < 2"}};
  if (lasso) {
    fit.x_star = Vector::Zero(n);
    fit.kkt = [g](const Vector& x) { return (x - g.prox(1.0, x)).norm(); };
  } else {
    fit.x_star = oracle_solve(pb).x_star;
    const ProblemInstance problem = pb;
    fit.kkt = [problem](const Vector& x) { return kkt_residual(problem, x, Vector()); };
  }
  fit.make_native = [g, tau, gamma]() {
    return identity_native([g, tau, gamma](const Vector& x) { return Vector(x + gamma * (prox(g, tau, x) - x)); });
  };
  return fit;
}

AlgorithmFitting proximal_fbs(const ProblemInstance& pb, const ParamMap& prm) {
  if (pb.kind != ProblemKind::Lasso) fail(ErrorCode::IncompatibleProblem, "ProximalFBS needs a Lasso problem");
  const double tau = param(prm, "tau"), gamma = param(prm, "gamma");
  const SmoothQuadratic f = smooth_part(pb);
  const Index n = f.H.rows();
  const ProxFunction g = ProxFunction::l1(pb.lambda);
  const CocoerciveMap B = CocoerciveMap::affine(f.H, f.g0);

  ModelOptions opts;
  opts.objective = Objective{[f, g](const Vector& x) { return f.value(x) + g.value(x); },
                             [f](const Vector& x) { return f.value(x); }, [f](const Vector& x) { return f.grad(x); }};
  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(single_block(n, BlockTerm::of(g)), B, scaled_identity(n, 1.0 / tau),
                                               Relaxation::scalar(gamma), opts);
  fit.admissible.ranges = {{"tau", tau, 0.0, 2.0 / B.beta, "nu = 1/tau > beta/2"},
                           {"gamma", gamma, 0.0, 2.0 - tau * B.beta / 2.0, "0 < gamma < 2 - tau beta/2"}};
  fit.x_star = oracle_solve(pb).x_star;
  const ProblemInstance problem = pb;
  fit.kkt = [problem](const Vector& x) { return kkt_residual(problem, x, Vector()); };
  fit.make_native = [f, g, tau, gamma]() {
    return identity_native(
        [f, g, tau, gamma](const Vector& x) { return Vector(x + gamma * (prox(g, tau, x - tau * f.grad(x)) - x)); });
  };
  return fit;
}

// Engine: proximal FBS on the dual, s+ = s + gamma (prox_{tau g*}(s - tau grad q(s)) - s)
// with q(s) = 1/2 ||w - A's||^2 (h = 0). Native: the primal-dual form with an explicit u.
AlgorithmFitting dykstra_dual(const ProblemInstance& pb, const ParamMap& prm) {
  const double tau = param(prm, "tau"), gamma = param(prm, "gamma");
  const Matrix A = pb.mat("D");
  const Vector w = pb.vec("b");
  const Index m = A.rows();
  const double lambda = pb.lambda;
  const ProxFunction g = ProxFunction::l1(lambda);
  const ProxFunction h = ProxFunction::zero();
  const CocoerciveMap B = CocoerciveMap::affine(A * A.transpose(), -A * w);

  auto q_value = [A, w](const Vector& s) { return 0.5 * (w - A.transpose() * s).squaredNorm(); };
  auto q_grad = [A, w](const Vector& s) { return Vector(-A * (w - A.transpose() * s)); };
  ModelOptions opts;
  opts.objective = Objective{[q_value, lambda](const Vector& s) {
                               // q + g*, with g* the indicator of the box [-lambda, lambda].
                               if (s.cwiseAbs().maxCoeff() > lambda * (1.0 + 1e-12)) return kInf;
                               return q_value(s);
                             },
                             q_value, q_grad};
  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(single_block(m, BlockTerm::conj(g), "s"), B,
                                               scaled_identity(m, 1.0 / tau), Relaxation::scalar(gamma), opts);
  const double a2 = B.beta;
  fit.admissible.ranges = {{"tau", tau, 0.0, 2.0 / a2, "0 < tau < 2/||A||^2"},
                           {"gamma", gamma, 0.0, 2.0 - tau * a2 / 2.0, "0 < gamma < 2 - tau ||A||^2/2"}};
  fit.x_star = oracle_solve(pb).dual;
  const ProblemInstance problem = pb;
  fit.kkt = [problem, A, w](const Vector& s) { return kkt_residual(problem, Vector(w - A.transpose() * s), s); };
  fit.dual_block = "s";
  fit.make_native = [A, w, g, h, tau, gamma]() {
    return identity_native([A, w, g, h, tau, gamma](const Vector& s) {
      const Vector u = prox(h, 1.0, w - A.transpose() * s);
      return Vector(s + gamma * (prox_conjugate(g, tau, s + tau * (A * u)) - s));
    });
  };
  return fit;
}

}  // namespace

AlgorithmFitting build_gradient(AlgorithmName name, const ProblemInstance& pb, const ParamMap& p) {
  switch (name) {
    case AlgorithmName::GradientDescent:
      return gradient_descent(pb, p);
    case AlgorithmName::ClassicalPPA:
      return classical_ppa(pb, p);
    case AlgorithmName::ProximalFBS:
      return proximal_fbs(pb, p);
    default:
      return dykstra_dual(pb, p);
  }
}

}  // namespace gfbs::zoo_detail
