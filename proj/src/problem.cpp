#include "gfbs/problem.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <Eigen/QR>

#include "gfbs/errors.hpp"
#include "gfbs/matrix_io.hpp"
#include "gfbs/prox.hpp"
#include "gfbs/rng.hpp"

namespace gfbs {

namespace {

constexpr Index kMaxTotalDim = 2000;

Matrix column(const Vector& v) { return Matrix(v); }

// Orthonormal columns from the QR factorization of a Gaussian matrix.
Matrix orthonormal(SplitMix64& rng, Index rows, Index cols) {
  const Matrix G = rng.normal_matrix(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Qm = qr.householderQ() * Matrix::Identity(rows, cols);
  // Fix the sign ambiguity so the basis is a deterministic function of G.
  const Matrix R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j)
    if (R(j, j) < 0) Qm.col(j) = -Qm.col(j);
  return Qm;
}

Vector uniform_vector(SplitMix64& rng, Index n, double lo, double hi) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

// rows x cols matrix with min(rows, cols) singular values drawn from [lo, hi].
Matrix conditioned(SplitMix64& rng, Index rows, Index cols, double lo, double hi) {
  const Index k = std::min(rows, cols);
  const Matrix U = orthonormal(rng, rows, k);
  const Matrix V = orthonormal(rng, cols, k);
  return U * uniform_vector(rng, k, lo, hi).asDiagonal() * V.transpose();
}

Matrix spd(SplitMix64& rng, Index n, double lo, double hi) {
  const Matrix U = orthonormal(rng, n, n);
  Matrix P = U * uniform_vector(rng, n, lo, hi).asDiagonal() * U.transpose();
  return 0.5 * (P + P.transpose());
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ConfigError, what);
}

Vector least_norm_solve(const Matrix& K, const Vector& rhs) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
  return cod.solve(rhs);
}

}  // namespace

const char* problem_kind_name(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::EqualityQP: return "EqualityQP";
    case ProblemKind::Lasso: return "Lasso";
    case ProblemKind::TV1D: return "TV1D";
    case ProblemKind::TwoBlockADMM: return "TwoBlockADMM";
  }
  return "?";
}

ProblemKind parse_problem_kind(const std::string& name) {
  for (ProblemKind k : {ProblemKind::EqualityQP, ProblemKind::Lasso, ProblemKind::TV1D, ProblemKind::TwoBlockADMM})
    if (name == problem_kind_name(k)) return k;
  fail(ErrorCode::ConfigError, "unknown problem kind '" + name + "'");
}

const Matrix& ProblemInstance::mat(const std::string& name) const {
  auto it = data.find(name);
  if (it == data.end())
    fail(ErrorCode::IncompatibleProblem, std::string(problem_kind_name(kind)) + " instance has no '" + name + "'");
  return it->second;
}

Vector ProblemInstance::vec(const std::string& name) const {
  const Matrix& m = mat(name);
  if (m.cols() != 1) fail(ErrorCode::DimensionMismatch, "'" + name + "' is not a vector");
  return m.col(0);
}

ProblemDims default_dims(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::EqualityQP: return {10, 4, 0};
    case ProblemKind::Lasso: return {20, 0, 50};
    case ProblemKind::TV1D: return {64, 0, 0};
    case ProblemKind::TwoBlockADMM: return {6, 3, 4};
  }
  return {};
}

Matrix tv_difference(Index n) {
  Matrix D = Matrix::Zero(std::max<Index>(n - 1, 0), n);
  for (Index i = 0; i + 1 < n; ++i) {
    D(i, i) = -0.5;
    D(i, i + 1) = 0.5;
  }
  return D;
}

ProblemInstance make_equality_qp(const Matrix& P, const Vector& q, const Matrix& A, const Vector& c) {
  require(P.rows() == P.cols() && q.size() == P.rows() && A.cols() == P.rows() && c.size() == A.rows(),
          "EqualityQP data sizes are inconsistent");
  ProblemInstance inst;
  inst.kind = ProblemKind::EqualityQP;
  inst.dims = {P.rows(), A.rows(), 0};
  inst.data = {{"P", P}, {"q", column(q)}, {"A", A}, {"c", column(c)}};
  return inst;
}

ProblemInstance make_lasso(const Matrix& M, const Vector& b, double lambda) {
  require(b.size() == M.rows(), "Lasso data sizes are inconsistent");
  require(lambda > 0.0, "Lasso lambda must be positive");
  ProblemInstance inst;
  inst.kind = ProblemKind::Lasso;
  inst.dims = {M.cols(), 0, M.rows()};
  inst.lambda = lambda;
  inst.data = {{"M", M}, {"b", column(b)}};
  return inst;
}

ProblemInstance make_tv1d(const Vector& b, double lambda) {
  require(b.size() >= 2, "TV1D needs at least two samples");
  require(lambda > 0.0, "TV1D lambda must be positive");
  ProblemInstance inst;
  inst.kind = ProblemKind::TV1D;
  inst.dims = {b.size(), 0, 0};
  inst.lambda = lambda;
  inst.data = {{"D", tv_difference(b.size())}, {"b", column(b)}};
  return inst;
}

ProblemInstance make_two_block(const Matrix& P, const Vector& q, const Matrix& R, const Vector& r, const Matrix& A,
                               const Matrix& B, const Vector& c) {
  require(P.rows() == P.cols() && q.size() == P.rows() && R.rows() == R.cols() && r.size() == R.rows() &&
              A.cols() == P.rows() && B.cols() == R.rows() && A.rows() == B.rows() && c.size() == A.rows(),
          "TwoBlockADMM data sizes are inconsistent");
  ProblemInstance inst;
  inst.kind = ProblemKind::TwoBlockADMM;
  inst.dims = {P.rows(), A.rows(), R.rows()};
  inst.data = {{"P", P}, {"q", column(q)}, {"R", R}, {"r", column(r)}, {"A", A}, {"B", B}, {"c", column(c)}};
  return inst;
}

ProblemInstance generate(ProblemKind kind, std::uint64_t seed, ProblemDims dims) {
  if (dims.n < 0 || dims.m < 0 || dims.p < 0) fail(ErrorCode::ConfigError, "dimensions must be nonnegative");
  if (dims.n + dims.m + dims.p > kMaxTotalDim)
    fail(ErrorCode::DimsTooLarge, "total dimension " + std::to_string(dims.n + dims.m + dims.p) + " exceeds " +
                                      std::to_string(kMaxTotalDim));
  SplitMix64 rng(seed);
  ProblemInstance inst;
  switch (kind) {
    case ProblemKind::EqualityQP: {
      require(dims.n >= 1 && dims.m >= 1 && dims.m <= dims.n, "EqualityQP needs 1 <= m <= n");
      const Matrix P = spd(rng, dims.n, 0.5, 2.0);
      const Vector q = rng.normal_vector(dims.n);
      const Matrix A = conditioned(rng, dims.m, dims.n, 0.5, 2.0);
      const Vector c = rng.normal_vector(dims.m);
      inst = make_equality_qp(P, q, A, c);
      break;
    }
    case ProblemKind::Lasso: {
      require(dims.n >= 1 && dims.p >= dims.n, "Lasso needs p >= n >= 1");
      const Matrix M = conditioned(rng, dims.p, dims.n, 0.5, 2.0);
      Vector x_true = Vector::Zero(dims.n);
      for (Index i = 0; i < dims.n; ++i)
        if (rng.uniform() < 0.25) x_true[i] = rng.normal();
      const Vector b = M * x_true + 0.1 * rng.normal_vector(dims.p);
      const double lambda = 0.1 * (M.transpose() * b).cwiseAbs().maxCoeff();
      inst = make_lasso(M, b, lambda > 0.0 ? lambda : 1.0);
      break;
    }
    case ProblemKind::TV1D: {
      require(dims.n >= 2, "TV1D needs n >= 2");
      Vector b(dims.n);
      double level = rng.normal();
      for (Index i = 0; i < dims.n; ++i) {
        if (rng.uniform() < 0.08) level = rng.normal();
        b[i] = level + 0.1 * rng.normal();
      }
      inst = make_tv1d(b, 0.2);
      break;
    }
    case ProblemKind::TwoBlockADMM: {
      require(dims.n >= 1 && dims.p >= 1 && dims.m >= 1 && dims.m <= dims.n && dims.m <= dims.p,
              "TwoBlockADMM needs 1 <= m <= min(n, p)");
      // Rank-deficient P whose kernel meets ker A when n > m + rank(P): the
      // u-subproblem then has a continuum of minimizers.
      const Index rank_p = std::max<Index>(1, dims.n / 3);
      const Matrix L = conditioned(rng, rank_p, dims.n, 0.5, 1.5);
      const Matrix P = L.transpose() * L;
      const Matrix A = conditioned(rng, dims.m, dims.n, 0.5, 2.0);
      const Matrix B = conditioned(rng, dims.m, dims.p, 0.5, 2.0);
      const Matrix R = spd(rng, dims.p, 0.5, 2.0);
      // q in ran P + ran A' keeps the objective bounded on the feasible set.
      const Vector q = P * rng.normal_vector(dims.n) + A.transpose() * rng.normal_vector(dims.m);
      const Vector r = rng.normal_vector(dims.p);
      const Vector c = rng.normal_vector(dims.m);
      inst = make_two_block(0.5 * (P + P.transpose()), q, R, r, A, B, c);
      break;
    }
  }
  inst.seed = seed;
  return inst;
}

double KktTerms::total() const { return std::hypot(stationarity, feasibility); }

KktTerms kkt_terms(const ProblemInstance& pb, const Vector& x, const Vector& duals) {
  auto need = [](Index got, Index want, const char* what) {
    if (got != want)
      fail(ErrorCode::DimensionMismatch,
           std::string(what) + " has size " + std::to_string(got) + ", expected " + std::to_string(want));
  };
  KktTerms t;
  switch (pb.kind) {
    case ProblemKind::EqualityQP: {
      const Matrix& P = pb.mat("P");
      const Matrix& A = pb.mat("A");
      need(x.size(), P.rows(), "x");
      const Vector g = P * x + pb.vec("q");
      Vector s = duals;
      if (s.size() == 0) s = least_norm_solve(A.transpose(), g);  // best multiplier for x
      need(s.size(), A.rows(), "dual");
      t.stationarity = (g - A.transpose() * s).norm();
      t.feasibility = (A * x - pb.vec("c")).norm();
      break;
    }
    case ProblemKind::Lasso: {
      const Matrix& M = pb.mat("M");
      need(x.size(), M.cols(), "x");
      const Vector g = -M.transpose() * (M * x - pb.vec("b"));
      t.stationarity = ProxFunction::l1(pb.lambda).subgradient_residual(x, g);
      break;
    }
    case ProblemKind::TV1D: {
      const Matrix& D = pb.mat("D");
      need(x.size(), D.cols(), "u");
      need(duals.size(), D.rows(), "dual");
      const double grad = (x - pb.vec("b") + D.transpose() * duals).norm();
      // s in lambda d||.||_1(Du)  <=>  s = P_[-lambda, lambda](s + Du); the natural residual
      // is insensitive to rounding noise in the zero entries of Du.
      const Vector moved = (duals + D * x).cwiseMax(-pb.lambda).cwiseMin(pb.lambda);
      const double member = (duals - moved).norm();
      t.stationarity = std::hypot(grad, member);
      break;
    }
    case ProblemKind::TwoBlockADMM: {
      const Matrix& P = pb.mat("P");
      const Matrix& R = pb.mat("R");
      const Matrix& A = pb.mat("A");
      const Matrix& B = pb.mat("B");
      need(x.size(), P.rows() + R.rows(), "(u, v)");
      need(duals.size(), A.rows(), "dual");
      const Vector u = x.head(P.rows()), v = x.tail(R.rows());
      const double su = (P * u + pb.vec("q") - A.transpose() * duals).norm();
      const double sv = (R * v + pb.vec("r") - B.transpose() * duals).norm();
      t.stationarity = std::hypot(su, sv);
      t.feasibility = (A * u + B * v - pb.vec("c")).norm();
      break;
    }
  }
  return t;
}

double kkt_residual(const ProblemInstance& problem, const Vector& x, const Vector& duals) {
  return kkt_terms(problem, x, duals).total();
}

namespace {

OracleSolution solve_equality_qp(const ProblemInstance& pb) {
  const Matrix& P = pb.mat("P");
  const Matrix& A = pb.mat("A");
  const Index n = P.rows(), m = A.rows();
  Matrix K = Matrix::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = P;
  K.topRightCorner(n, m) = A.transpose();
  K.bottomLeftCorner(m, n) = A;
  Vector rhs(n + m);
  rhs << -pb.vec("q"), pb.vec("c");
  const Vector z = least_norm_solve(K, rhs);
  OracleSolution sol{z.head(n), -z.tail(m), 0.0};
  sol.kkt_residual = kkt_residual(pb, sol.x_star, sol.dual);
  return sol;
}

OracleSolution solve_two_block(const ProblemInstance& pb) {
  const Matrix& P = pb.mat("P");
  const Matrix& R = pb.mat("R");
  const Matrix& A = pb.mat("A");
  const Matrix& B = pb.mat("B");
  const Index n = P.rows(), p = R.rows(), m = A.rows();
  Matrix K = Matrix::Zero(n + p + m, n + p + m);
  K.block(0, 0, n, n) = P;
  K.block(n, n, p, p) = R;
  K.block(0, n + p, n, m) = A.transpose();
  K.block(n, n + p, p, m) = B.transpose();
  K.block(n + p, 0, m, n) = A;
  K.block(n + p, n, m, p) = B;
  Vector rhs(n + p + m);
  rhs << -pb.vec("q"), -pb.vec("r"), pb.vec("c");
  const Vector z = least_norm_solve(K, rhs);
  OracleSolution sol{z.head(n + p), -z.tail(m), 0.0};
  sol.kkt_residual = kkt_residual(pb, sol.x_star, sol.dual);
  return sol;
}

OracleSolution solve_lasso(const ProblemInstance& pb) {
  const Matrix& M = pb.mat("M");
  const Vector b = pb.vec("b");
  const Index n = M.cols();
  const Matrix MtM = M.transpose() * M;
  const Vector Mtb = M.transpose() * b;
  const double L = psd_lipschitz(MtM);
  const double step = 1.0 / L;
  const ProxFunction reg = ProxFunction::l1(pb.lambda);

  // Reference proximal-gradient iteration with a fixed 1/L step.
  Vector x = Vector::Zero(n);
  for (int it = 0; it < 2000000; ++it) {
    const Vector next = reg.prox(step, x - step * (MtM * x - Mtb));
    const double moved = (next - x).norm();
    x = next;
    if (moved <= 1e-13) break;
  }
  OracleSolution best{x, Vector(), kkt_residual(pb, x, Vector())};

  // Polish: least squares on the detected support with the detected signs.
  std::vector<Index> support;
  for (Index i = 0; i < n; ++i)
    if (x[i] != 0.0) support.push_back(i);
  if (!support.empty()) {
    Vector sgn(static_cast<Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) sgn[static_cast<Index>(k)] = x[support[k]] > 0 ? 1.0 : -1.0;
    const Matrix H = MtM(support, support);
    const Vector rhs = Mtb(support) - pb.lambda * sgn;
    const Vector xs = H.ldlt().solve(rhs);
    Vector polished = Vector::Zero(n);
    polished(support) = xs;
    const bool signs_ok = (xs.array() * sgn.array() > 0.0).all();
    const double res = kkt_residual(pb, polished, Vector());
    if (signs_ok && res < best.kkt_residual) best = {polished, Vector(), res};
  } else {
    best.kkt_residual = kkt_residual(pb, best.x_star, Vector());
  }
  return best;
}

OracleSolution solve_tv1d(const ProblemInstance& pb) {
  const Matrix& D = pb.mat("D");
  const Vector b = pb.vec("b");
  const double lam = pb.lambda;
  const Matrix DDt = D * D.transpose();
  const Vector Db = D * b;
  const double step = 1.0 / psd_lipschitz(DDt);

  // Projected gradient on the dual  min 1/2 ||b - D's||^2  s.t. |s_i| <= lambda.
  Vector s = Vector::Zero(D.rows());
  for (int it = 0; it < 2000000; ++it) {
    const Vector next = (s - step * (DDt * s - Db)).cwiseMax(-lam).cwiseMin(lam);
    const double moved = (next - s).norm();
    s = next;
    if (moved <= 1e-13) break;
  }
  OracleSolution best{b - D.transpose() * s, s, 0.0};
  best.kkt_residual = kkt_residual(pb, best.x_star, s);

  // Polish: solve exactly for the dual coordinates strictly inside the box.
  std::vector<Index> active, inactive;
  for (Index i = 0; i < s.size(); ++i) (std::abs(s[i]) >= lam ? active : inactive).push_back(i);
  if (!inactive.empty()) {
    Vector sp = s;
    for (Index i : active) sp[i] = s[i] > 0 ? lam : -lam;
    const Matrix DI = D(inactive, Eigen::all);
    const Vector rhs = DI * b - DI * D(active, Eigen::all).transpose() * sp(active);
    const Vector sI = (DI * DI.transpose()).ldlt().solve(rhs);
    sp(inactive) = sI;
    if ((sI.cwiseAbs().array() < lam).all()) {
      const Vector u = b - D.transpose() * sp;
      const double res = kkt_residual(pb, u, sp);
      if (res < best.kkt_residual) best = {u, sp, res};
    }
  }
  return best;
}

}  // namespace

double psd_lipschitz(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
  return std::max(es.eigenvalues().maxCoeff(), 1e-300);
}

OracleSolution oracle_solve(const ProblemInstance& problem) {
  OracleSolution sol;
  switch (problem.kind) {
    case ProblemKind::EqualityQP: sol = solve_equality_qp(problem); break;
    case ProblemKind::Lasso: sol = solve_lasso(problem); break;
    case ProblemKind::TV1D: sol = solve_tv1d(problem); break;
    case ProblemKind::TwoBlockADMM: sol = solve_two_block(problem); break;
  }
  if (!(sol.kkt_residual <= 1e-10))
    fail(ErrorCode::OracleNotConverged, std::string(problem_kind_name(problem.kind)) + " oracle reached KKT residual " +
                                            format_real(sol.kkt_residual));
  return sol;
}

Vector smooth_minimizer(const ProblemInstance& problem) {
  switch (problem.kind) {
    case ProblemKind::Lasso: {
      const Matrix& M = problem.mat("M");
      return least_norm_solve(M.transpose() * M, M.transpose() * problem.vec("b"));
    }
    case ProblemKind::EqualityQP:
      return least_norm_solve(problem.mat("P"), -problem.vec("q"));
    default:
      fail(ErrorCode::IncompatibleProblem, std::string(problem_kind_name(problem.kind)) + " has no smooth-only form");
  }
}

void write_instance(std::ostream& out, const ProblemInstance& pb) {
  out << "gfbs-instance\n";
  out << "kind " << problem_kind_name(pb.kind) << '\n';
  out << "seed " << pb.seed << '\n';
  out << "dims " << pb.dims.n << ' ' << pb.dims.m << ' ' << pb.dims.p << '\n';
  out << "lambda " << format_real(pb.lambda) << '\n';
  for (const auto& [name, m] : pb.data) {
    out << "matrix " << name << '\n';
    write_matrix(out, m);
  }
  out << "end\n";
}

ProblemInstance read_instance(std::istream& in) {
  std::string word;
  if (!(in >> word) || word != "gfbs-instance") fail(ErrorCode::ConfigError, "not a gfbs instance file");
  ProblemInstance pb;
  while (in >> word) {
    if (word == "end") return pb;
    if (word == "kind") {
      in >> word;
      pb.kind = parse_problem_kind(word);
    } else if (word == "seed") {
      in >> pb.seed;
    } else if (word == "dims") {
      in >> pb.dims.n >> pb.dims.m >> pb.dims.p;
    } else if (word == "lambda") {
      in >> pb.lambda;
    } else if (word == "matrix") {
      std::string name;
      in >> name;
      pb.data[name] = read_matrix(in);
    } else {
      fail(ErrorCode::ConfigError, "unexpected '" + word + "' in instance file");
    }
    if (!in) fail(ErrorCode::ConfigError, "truncated instance file");
  }
  fail(ErrorCode::ConfigError, "instance file lacks 'end'");
}

}  // namespace gfbs
