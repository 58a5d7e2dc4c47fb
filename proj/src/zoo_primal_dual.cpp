// Primal-dual fittings on min_u 1/2 ||u - b||^2 + g(Au), g = lambda ||.||_1,
// A = D (the TV1D instances): Chambolle-Pock, Arias-Combettes, PAPC, AFBA and
// both Condat variants.
#include <cmath>
#include <limits>

#include "gfbs/errors.hpp"
#include "gfbs/matrix_io.hpp"
#include "gfbs/zoo.hpp"

namespace gfbs::zoo_detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TvData {
  Matrix A;  // D
  Vector b;
  double lambda;
  Index n, m;
  ProxFunction g, fit_term;  // g = lambda ||.||_1; fit_term = 1/2 ||. - b||^2

  explicit TvData(const ProblemInstance& pb)
      : A(pb.mat("D")), b(pb.vec("b")), lambda(pb.lambda), n(A.cols()), m(A.rows()),
        g(ProxFunction::l1(pb.lambda)), fit_term(ProxFunction::squared_l2(pb.vec("b"), 1.0)) {}

  Vector grad_f(const Vector& u) const { return u - b; }
};

Matrix eye(Index n, double s = 1.0) { return s * Matrix::Identity(n, n); }

// Model whose declared eta is the best constant for positive definite S.
std::shared_ptr<SplittingModel> with_static_eta(const MonotoneBlockOperator& A, const CocoerciveMap& B,
                                                const Matrix& Q, const Matrix& M, ModelOptions opts) {
  auto model = std::make_shared<SplittingModel>(A, B, Q, Relaxation::op(M), opts);
  const DegenerateMetric* S = model->s_metric();
  if (S && S->rank() == S->dim()) {
    opts.declared_eta = generalized_min_eig(model->H(), model->S_raw());
    model = std::make_shared<SplittingModel>(A, B, Q, Relaxation::op(M), opts);
  }
  return model;
}

// Reference point and KKT closure; `order` lists where u and s sit in the state.
struct TvReference {
  Vector u, s;
};

TvReference tv_reference(const ProblemInstance& pb) {
  const OracleSolution sol = oracle_solve(pb);
  return {sol.x_star, sol.dual};
}

AlgorithmFitting chambolle_pock(const ProblemInstance& pb, const ParamMap& prm) {
  const TvData d(pb);
  const double sigma = param(prm, "sigma"), tau = param(prm, "tau");
  const Index n = d.n, m = d.m;
  const BlockLayout layout({{"s", m}, {"u", n}});
  Matrix L = Matrix::Zero(m + n, m + n);
  L.topRightCorner(m, n) = -d.A;
  L.bottomLeftCorner(n, m) = d.A.transpose();
  Matrix Q(m + n, m + n);
  Q << eye(m, 1.0 / sigma), -d.A, -d.A.transpose(), eye(n, 1.0 / tau);
  MonotoneBlockOperator op(layout, {BlockTerm::conj(d.g), BlockTerm::of(d.fit_term)}, L);

  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(op, CocoerciveMap::zero(), Q);
  const double a2 = spectral_norm_sq(d.A);
  fit.admissible.ranges = {{"sigma", sigma, 0.0, kInf, "0 < sigma"},
                           {"tau", tau, 0.0, 1.0 / (sigma * a2), "0 < tau < 1/(sigma ||A'A||)"}};
  fit.index_shift = "x^k = (s^k, u^{k-1})";
  const TvReference ref = tv_reference(pb);
  fit.x_star.resize(m + n);
  fit.x_star << ref.s, ref.u;
  const ProblemInstance problem = pb;
  fit.kkt = [problem, m, n](const Vector& x) { return kkt_residual(problem, x.tail(n), x.head(m)); };
  fit.dual_block = "s";

  // Native state (s^k, u^k, u^{k-1}); the engine holds (s^k, u^{k-1}).
  fit.make_native = [d, sigma, tau]() -> std::unique_ptr<NativeIterator> {
    const Index n = d.n, m = d.m;
    auto init = [d, tau, n, m](const Vector& x) {
      const Vector s = x.head(m), u_prev = x.tail(n);
      Vector st(m + 2 * n);
      st << s, prox(d.fit_term, tau, u_prev - tau * d.A.transpose() * s), u_prev;
      return st;
    };
    auto step = [d, sigma, tau, n, m](const Vector& st) {
      const Vector s = st.head(m), u = st.segment(m, n), u_prev = st.tail(n);
      const Vector s1 = prox_conjugate(d.g, sigma, s + sigma * d.A * (2.0 * u - u_prev));
      const Vector u1 = prox(d.fit_term, tau, u - tau * d.A.transpose() * s1);
      Vector out(st.size());
      out << s1, u1, u;
      return out;
    };
    auto view = [n, m](const Vector& st) {
      Vector x(m + n);
      x << st.head(m), st.tail(n);
      return x;
    };
    return std::make_unique<LambdaNative>(init, step, view);
  };
  return fit;
}

AlgorithmFitting arias_combettes(const ProblemInstance& pb, const ParamMap& prm) {
  const TvData d(pb);
  const double tau = param(prm, "tau");
  const Index n = d.n, m = d.m;
  const BlockLayout layout({{"u", n}, {"s", m}});
  Matrix L = Matrix::Zero(n + m, n + m);
  L.topRightCorner(n, m) = d.A.transpose();
  L.bottomLeftCorner(m, n) = -d.A;
  Matrix Q(n + m, n + m);
  Q << eye(n, 1.0 / tau), -d.A.transpose(), d.A, eye(m, 1.0 / tau);
  Matrix M(n + m, n + m);
  M << eye(n), -tau * d.A.transpose(), tau * d.A, eye(m);
  MonotoneBlockOperator op(layout, {BlockTerm::of(d.fit_term), BlockTerm::conj(d.g)}, L);

  ModelOptions opts;
  opts.g_form = GForm::NonDegenerate;
  AlgorithmFitting fit;
  fit.model = with_static_eta(op, CocoerciveMap::zero(), Q, M, opts);
  fit.admissible.ranges = {{"tau", tau, 0.0, 1.0 / std::sqrt(spectral_norm_sq(d.A)), "0 < tau < 1/||A||"}};
  const TvReference ref = tv_reference(pb);
  fit.x_star.resize(n + m);
  fit.x_star << ref.u, ref.s;
  const ProblemInstance problem = pb;
  fit.kkt = [problem, m, n](const Vector& x) { return kkt_residual(problem, x.head(n), x.tail(m)); };
  fit.dual_block = "s";

  fit.make_native = [d, tau]() -> std::unique_ptr<NativeIterator> {
    const Index n = d.n, m = d.m;
    auto step = [d, tau, n, m](const Vector& x) {
      const Vector u = x.head(n), s = x.tail(m);
      const Vector ut = prox(d.fit_term, tau, u - tau * d.A.transpose() * s);
      const Vector stl = prox_conjugate(d.g, tau, s + tau * d.A * u);
      Vector out(n + m);
      out << ut - tau * d.A.transpose() * (stl - s), stl + tau * d.A * (ut - u);
      return out;
    };
    auto id = [](const Vector& x) { return x; };
    return std::make_unique<LambdaNative>(id, step, id);
  };
  return fit;
}

// Shared pieces of PAPC and AFBA: state (s, u), B = (0, grad f), beta = 1.
struct SuSetup {
  BlockLayout layout;
  Matrix L;
  CocoerciveMap B;
};

SuSetup su_setup(const TvData& d) {
  const Index n = d.n, m = d.m;
  SuSetup s{BlockLayout({{"s", m}, {"u", n}}), Matrix::Zero(m + n, m + n), {}};
  s.L.topRightCorner(m, n) = -d.A;
  s.L.bottomLeftCorner(n, m) = d.A.transpose();
  Matrix H = Matrix::Zero(m + n, m + n);
  H.bottomRightCorner(n, n) = eye(n);
  Vector c = Vector::Zero(m + n);
  c.tail(n) = -d.b;
  s.B = CocoerciveMap::affine(H, c);
  return s;
}

void papc_ranges(AlgorithmFitting& fit, const TvData& d, double sigma, double tau, double beta) {
  const double a2 = spectral_norm_sq(d.A);
  const double hi = std::min(2.0 / beta, (2.0 - beta * sigma) / (2.0 * sigma * a2));
  fit.admissible.ranges = {{"sigma", sigma, 0.0, 2.0 / beta, "0 < sigma < 2/beta"},
                           {"tau", tau, 0.0, hi, "0 < tau < min{2/beta, (2 - beta sigma)/(2 sigma ||A'A||)}"}};
  const double nu = std::min(1.0 / sigma - tau * a2, 1.0 / tau);
  fit.admissible.notes.push_back("nu = min{1/sigma - tau ||A'A||, 1/tau} = " + format_real(nu));
}

void su_reference(AlgorithmFitting& fit, const ProblemInstance& pb, Index m, Index n) {
  const TvReference ref = tv_reference(pb);
  fit.x_star.resize(m + n);
  fit.x_star << ref.s, ref.u;
  const ProblemInstance problem = pb;
  fit.kkt = [problem, m, n](const Vector& x) { return kkt_residual(problem, x.tail(n), x.head(m)); };
  fit.dual_block = "s";
}

AlgorithmFitting papc(const ProblemInstance& pb, const ParamMap& prm) {
  const TvData d(pb);
  const double sigma = param(prm, "sigma"), tau = param(prm, "tau");
  const Index n = d.n, m = d.m;
  const SuSetup su = su_setup(d);
  Matrix Q = Matrix::Zero(m + n, m + n);
  Q.topLeftCorner(m, m) = eye(m, 1.0 / sigma) - tau * d.A * d.A.transpose();
  Q.bottomRightCorner(n, n) = eye(n, 1.0 / tau);
  MonotoneBlockOperator op(su.layout, {BlockTerm::conj(d.g), BlockTerm::of(ProxFunction::zero())}, su.L);

  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(op, su.B, Q);
  papc_ranges(fit, d, sigma, tau, su.B.beta);
  su_reference(fit, pb, m, n);

  fit.make_native = [d, sigma, tau]() -> std::unique_ptr<NativeIterator> {
    const Index n = d.n, m = d.m;
    auto step = [d, sigma, tau, n, m](const Vector& x) {
      const Vector s = x.head(m), u = x.tail(n);
      const Vector fwd = u - tau * d.grad_f(u);
      const Vector s1 =
          prox_conjugate(d.g, sigma, s - sigma * tau * d.A * (d.A.transpose() * s) + sigma * d.A * fwd);
      Vector out(m + n);
      out << s1, fwd - tau * d.A.transpose() * s1;
      return out;
    };
    auto id = [](const Vector& x) { return x; };
    return std::make_unique<LambdaNative>(id, step, id);
  };
  return fit;
}

AlgorithmFitting afba(const ProblemInstance& pb, const ParamMap& prm) {
  const TvData d(pb);
  const double sigma = param(prm, "sigma"), tau = param(prm, "tau");
  const Index n = d.n, m = d.m;
  const SuSetup su = su_setup(d);
  const ProxFunction h = ProxFunction::zero();
  Matrix Q = Matrix::Zero(m + n, m + n);
  Q.topLeftCorner(m, m) = eye(m, 1.0 / sigma);
  Q.bottomLeftCorner(n, m) = -d.A.transpose();
  Q.bottomRightCorner(n, n) = eye(n, 1.0 / tau);
  Matrix M = Matrix::Identity(m + n, m + n);
  M.bottomLeftCorner(n, m) = -tau * d.A.transpose();
  MonotoneBlockOperator op(su.layout, {BlockTerm::conj(d.g), BlockTerm::of(h)}, su.L);

  ModelOptions opts;
  opts.g_form = GForm::NonDegenerate;
  AlgorithmFitting fit;
  fit.model = with_static_eta(op, su.B, Q, M, opts);
  papc_ranges(fit, d, sigma, tau, su.B.beta);
  su_reference(fit, pb, m, n);
  fit.index_shift = "native carries w^k = prox_{tau h}(u^k - tau grad f(u^k) - tau A's^k), eliminated in the engine";

  // Native state (s, u, w) following the three displayed lines.
  fit.make_native = [d, h, sigma, tau]() -> std::unique_ptr<NativeIterator> {
    const Index n = d.n, m = d.m;
    auto w_of = [d, h, tau](const Vector& s, const Vector& u) {
      return prox(h, tau, u - tau * d.grad_f(u) - tau * d.A.transpose() * s);
    };
    auto init = [w_of, n, m](const Vector& x) {
      Vector st(m + 2 * n);
      st << x, w_of(x.head(m), x.tail(n));
      return st;
    };
    auto step = [d, sigma, tau, w_of, n, m](const Vector& st) {
      const Vector s = st.head(m), w = st.tail(n);
      const Vector s1 = prox_conjugate(d.g, sigma, s + sigma * d.A * w);
      const Vector u1 = w - tau * d.A.transpose() * (s1 - s);
      Vector out(m + 2 * n);
      out << s1, u1, w_of(s1, u1);
      return out;
    };
    auto view = [n, m](const Vector& st) { return Vector(st.head(m + n)); };
    return std::make_unique<LambdaNative>(init, step, view);
  };
  return fit;
}

// Condat with m = 2 dual blocks: even and odd rows of D.
AlgorithmFitting condat(const ProblemInstance& pb, const ParamMap& prm, bool second) {
  const TvData d(pb);
  const double sigma = param(prm, "sigma"), tau = param(prm, "tau"), gamma = param(prm, "gamma");
  const Index n = d.n, m = d.m, m1 = (m + 1) / 2, m2 = m / 2;
  Matrix A1(m1, n), A2(m2, n);
  for (Index i = 0; i < m; ++i) (i % 2 == 0 ? A1.row(i / 2) : A2.row(i / 2)) = d.A.row(i);
  const Index N = n + m1 + m2;
  const BlockLayout layout({{"u", n}, {"s1", m1}, {"s2", m2}});
  Matrix L = Matrix::Zero(N, N);
  L.block(0, n, n, m1) = A1.transpose();
  L.block(0, n + m1, n, m2) = A2.transpose();
  L.block(n, 0, m1, n) = -A1;
  L.block(n + m1, 0, m2, n) = -A2;
  const double sign = second ? 1.0 : -1.0;
  Matrix Q = Matrix::Zero(N, N);
  Q.block(0, 0, n, n) = eye(n, 1.0 / tau);
  Q.block(0, n, n, m1) = sign * A1.transpose();
  Q.block(0, n + m1, n, m2) = sign * A2.transpose();
  Q.block(n, 0, m1, n) = sign * A1;
  Q.block(n + m1, 0, m2, n) = sign * A2;
  Q.block(n, n, m1 + m2, m1 + m2) = eye(m1 + m2, 1.0 / sigma);
  Matrix H = Matrix::Zero(N, N);
  H.topLeftCorner(n, n) = eye(n);
  Vector c = Vector::Zero(N);
  c.head(n) = -d.b;
  const CocoerciveMap B = CocoerciveMap::affine(H, c);
  const ProxFunction h = ProxFunction::zero();
  MonotoneBlockOperator op(layout, {BlockTerm::of(h), BlockTerm::conj(d.g), BlockTerm::conj(d.g)}, L);

  AlgorithmFitting fit;
  fit.model = std::make_shared<SplittingModel>(op, B, Q, Relaxation::scalar(gamma));
  const double a2 = spectral_norm_sq(d.A);  // ||sum_i A_i'A_i|| = ||D'D||
  const double nu_formula = 1.0 / tau - sigma * a2;
  const double gamma_hi = nu_formula > 0.0 ? 2.0 - (B.beta / 2.0) / nu_formula : -kInf;
  fit.admissible.ranges = {{"sigma", sigma, 0.0, kInf, "0 < sigma"},
                           {"tau", tau, 0.0, 1.0 / (sigma * a2), "0 < tau < 1/(sigma ||sum A_i'A_i||)"},
                           {"gamma", gamma, 0.0, gamma_hi, "0 < gamma < 2 - (beta/2)/(1/tau - sigma ||sum A_i'A_i||)"}};
  fit.admissible.notes.push_back("nu (formula 1/tau - sigma ||sum A_i'A_i||) = " + format_real(nu_formula) +
                                 "; smallest eigenvalue of Q = " + format_real(fit.model->nu()));

  const TvReference ref = tv_reference(pb);
  fit.x_star.resize(N);
  fit.x_star.head(n) = ref.u;
  for (Index i = 0; i < m; ++i) fit.x_star[i % 2 == 0 ? n + i / 2 : n + m1 + i / 2] = ref.s[i];
  const ProblemInstance problem = pb;
  auto merge_s = [n, m, m1](const Vector& x) {
    Vector s(m);
    for (Index i = 0; i < m; ++i) s[i] = x[i % 2 == 0 ? n + i / 2 : n + m1 + i / 2];
    return s;
  };
  fit.kkt = [problem, merge_s, n](const Vector& x) { return kkt_residual(problem, x.head(n), merge_s(x)); };
  fit.dual_block = "s1";

  fit.make_native = [d, h, A1, A2, sigma, tau, gamma, second]() -> std::unique_ptr<NativeIterator> {
    const Index n = d.n, m1 = A1.rows(), m2 = A2.rows();
    auto step = [=](const Vector& x) {
      const Vector u = x.head(n), s1 = x.segment(n, m1), s2 = x.tail(m2);
      Vector ut, st1, st2;
      if (!second) {
        ut = prox(h, tau, u - tau * d.grad_f(u) - tau * (A1.transpose() * s1 + A2.transpose() * s2));
        st1 = prox_conjugate(d.g, sigma, s1 + sigma * A1 * (2.0 * ut - u));
        st2 = prox_conjugate(d.g, sigma, s2 + sigma * A2 * (2.0 * ut - u));
      } else {
        st1 = prox_conjugate(d.g, sigma, s1 + sigma * A1 * u);
        st2 = prox_conjugate(d.g, sigma, s2 + sigma * A2 * u);
        ut = prox(h, tau,
                  u - tau * d.grad_f(u) - tau * (A1.transpose() * (2.0 * st1 - s1) + A2.transpose() * (2.0 * st2 - s2)));
      }
      Vector out(x.size());
      out << u + gamma * (ut - u), s1 + gamma * (st1 - s1), s2 + gamma * (st2 - s2);
      return out;
    };
    auto id = [](const Vector& x) { return x; };
    return std::make_unique<LambdaNative>(id, step, id);
  };
  return fit;
}

}  // namespace

AlgorithmFitting build_primal_dual(AlgorithmName name, const ProblemInstance& pb, const ParamMap& p) {
  switch (name) {
    case AlgorithmName::ChambollePock:
      return chambolle_pock(pb, p);
    case AlgorithmName::AriasCombettes:
      return arias_combettes(pb, p);
    case AlgorithmName::PAPC:
      return papc(pb, p);
    case AlgorithmName::AFBA:
      return afba(pb, p);
    case AlgorithmName::CondatI:
      return condat(pb, p, false);
    case AlgorithmName::CondatII:
      return condat(pb, p, true);
    default:
      fail(ErrorCode::IncompatibleProblem, std::string("not a primal-dual fitting: ") + algorithm_name(name));
  }
}

}  // namespace gfbs::zoo_detail
