#include "gfbs/prox.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gfbs/errors.hpp"
#include "gfbs/matrix_io.hpp"

namespace gfbs {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_size(Index got, Index want, const char* what) {
  if (got != want)
    fail(ErrorCode::DimensionMismatch,
         std::string(what) + ": size " + std::to_string(got) + " vs " + std::to_string(want));
}

Vector expand(const Vector& v, bool uniform, Index n, const char* what) {
  if (uniform) return Vector::Constant(n, v[0]);
  require_size(n, v.size(), what);
  return v;
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

ProxFunction ProxFunction::l1(double weight) {
  if (!(weight >= 0.0)) fail(ErrorCode::ConfigError, "l1 weight must be nonnegative");
  return ProxFunction(L1{weight});
}

ProxFunction ProxFunction::squared_l2(Vector center, double weight) {
  if (!(weight >= 0.0)) fail(ErrorCode::ConfigError, "squared_l2 weight must be nonnegative");
  return ProxFunction(SquaredL2{std::move(center), weight, false});
}

ProxFunction ProxFunction::squared_l2(double uniform_center, double weight) {
  if (!(weight >= 0.0)) fail(ErrorCode::ConfigError, "squared_l2 weight must be nonnegative");
  return ProxFunction(SquaredL2{Vector::Constant(1, uniform_center), weight, true});
}

ProxFunction ProxFunction::quadratic(Matrix P, Vector q) {
  if (P.rows() != P.cols()) fail(ErrorCode::NonSquare, "quadratic P must be square");
  require_size(q.size(), P.rows(), "quadratic q");
  return ProxFunction(Quadratic{std::move(P), std::move(q)});
}

ProxFunction ProxFunction::linear(Vector c) { return ProxFunction(Linear{std::move(c)}); }

ProxFunction ProxFunction::box(Vector lo, Vector hi) {
  require_size(hi.size(), lo.size(), "box bounds");
  if ((lo.array() > hi.array()).any()) fail(ErrorCode::ConfigError, "box with lo > hi");
  return ProxFunction(Box{std::move(lo), std::move(hi), false});
}

ProxFunction ProxFunction::box(double lo, double hi) {
  if (lo > hi) fail(ErrorCode::ConfigError, "box with lo > hi");
  return ProxFunction(Box{Vector::Constant(1, lo), Vector::Constant(1, hi), true});
}

ProxFunction ProxFunction::custom(CustomCallbacks callbacks, std::string label) {
  return ProxFunction(Custom{std::move(callbacks), std::move(label)});
}

ProxFunction::Kind ProxFunction::kind() const {
  return static_cast<Kind>(repr_.index());
}

std::string ProxFunction::kind_name() const {
  static const char* names[] = {"zero", "l1", "squared_l2", "quadratic", "linear", "box", "custom"};
  return names[repr_.index()];
}

double ProxFunction::value(const Vector& x) const {
  return std::visit(
      overloaded{
          [&](const Zero&) { return 0.0; },
          [&](const L1& f) { return f.weight * x.lpNorm<1>(); },
          [&](const SquaredL2& f) {
            return 0.5 * f.weight * (x - expand(f.center, f.uniform, x.size(), "squared_l2")).squaredNorm();
          },
          [&](const Quadratic& f) {
            require_size(x.size(), f.q.size(), "quadratic");
            return 0.5 * x.dot(f.P * x) + f.q.dot(x);
          },
          [&](const Linear& f) {
            require_size(x.size(), f.c.size(), "linear");
            return f.c.dot(x);
          },
          [&](const Box& f) {
            const Vector lo = expand(f.lo, f.uniform, x.size(), "box");
            const Vector hi = expand(f.hi, f.uniform, x.size(), "box");
            return ((x.array() >= lo.array()) && (x.array() <= hi.array())).all() ? 0.0 : kInf;
          },
          [&](const Custom& f) {
            if (!f.cb.value) fail(ErrorCode::UnsupportedKind, f.label + " has no value callback");
            return f.cb.value(x);
          },
      },
      repr_);
}

Vector ProxFunction::prox(double tau, const Vector& y) const {
  if (!(tau > 0.0)) fail(ErrorCode::ConfigError, "prox step must be positive");
  return std::visit(
      overloaded{
          [&](const Zero&) -> Vector { return y; },
          [&](const L1& f) -> Vector {
            const double t = tau * f.weight;
            Vector p(y.size());
            for (Index i = 0; i < y.size(); ++i) p[i] = sign(y[i]) * std::max(std::abs(y[i]) - t, 0.0);
            return p;
          },
          [&](const SquaredL2& f) -> Vector {
            const Vector b = expand(f.center, f.uniform, y.size(), "squared_l2");
            return (y + tau * f.weight * b) / (1.0 + tau * f.weight);
          },
          [&](const Quadratic& f) -> Vector {
            require_size(y.size(), f.q.size(), "quadratic");
            const Matrix H = Matrix::Identity(y.size(), y.size()) + tau * f.P;
            return H.ldlt().solve(y - tau * f.q);
          },
          [&](const Linear& f) -> Vector {
            require_size(y.size(), f.c.size(), "linear");
            return y - tau * f.c;
          },
          [&](const Box& f) -> Vector {
            const Vector lo = expand(f.lo, f.uniform, y.size(), "box");
            const Vector hi = expand(f.hi, f.uniform, y.size(), "box");
            return y.cwiseMax(lo).cwiseMin(hi);
          },
          [&](const Custom& f) -> Vector {
            if (!f.cb.prox) fail(ErrorCode::UnsupportedKind, f.label + " has no prox callback");
            return f.cb.prox(tau, y);
          },
      },
      repr_);
}

double ProxFunction::subgradient_residual(const Vector& x, const Vector& g) const {
  require_size(g.size(), x.size(), "subgradient");
  return std::visit(
      overloaded{
          [&](const Zero&) { return g.norm(); },
          [&](const L1& f) {
            double s = 0.0;
            for (Index i = 0; i < x.size(); ++i) {
              const double d = x[i] != 0.0 ? g[i] - f.weight * sign(x[i]) : std::max(0.0, std::abs(g[i]) - f.weight);
              s += d * d;
            }
            return std::sqrt(s);
          },
          [&](const SquaredL2& f) {
            return (g - f.weight * (x - expand(f.center, f.uniform, x.size(), "squared_l2"))).norm();
          },
          [&](const Quadratic& f) {
            require_size(x.size(), f.q.size(), "quadratic");
            return (g - f.P * x - f.q).norm();
          },
          [&](const Linear& f) {
            require_size(x.size(), f.c.size(), "linear");
            return (g - f.c).norm();
          },
          [&](const Box& f) {
            const Vector lo = expand(f.lo, f.uniform, x.size(), "box");
            const Vector hi = expand(f.hi, f.uniform, x.size(), "box");
            double s = 0.0;
            for (Index i = 0; i < x.size(); ++i) {
              if (x[i] < lo[i] || x[i] > hi[i]) return kInf;
              double d = g[i];  // interior: normal cone is {0}
              if (lo[i] == hi[i]) {
                d = 0.0;
              } else if (x[i] == lo[i]) {
                d = std::max(0.0, g[i]);
              } else if (x[i] == hi[i]) {
                d = std::min(0.0, g[i]);
              }
              s += d * d;
            }
            return std::sqrt(s);
          },
          [&](const Custom& f) {
            if (!f.cb.subgradient_residual)
              fail(ErrorCode::UnsupportedKind, f.label + " has no subgradient-membership callback");
            return f.cb.subgradient_residual(x, g);
          },
      },
      repr_);
}

bool ProxFunction::has_affine_gradient() const {
  const Kind k = kind();
  return k == Kind::Zero || k == Kind::SquaredL2 || k == Kind::Quadratic || k == Kind::Linear;
}

Matrix ProxFunction::affine_hessian(Index n) const {
  return std::visit(overloaded{
                        [&](const SquaredL2& f) -> Matrix { return f.weight * Matrix::Identity(n, n); },
                        [&](const Quadratic& f) -> Matrix {
                          require_size(n, f.P.rows(), "quadratic");
                          return f.P;
                        },
                        [&](const auto&) -> Matrix {
                          if (!has_affine_gradient())
                            fail(ErrorCode::UnsupportedKind, kind_name() + " has no affine gradient");
                          return Matrix::Zero(n, n);
                        },
                    },
                    repr_);
}

Vector ProxFunction::affine_offset(Index n) const {
  return std::visit(overloaded{
                        [&](const SquaredL2& f) -> Vector {
                          return -f.weight * expand(f.center, f.uniform, n, "squared_l2");
                        },
                        [&](const Quadratic& f) -> Vector {
                          require_size(n, f.q.size(), "quadratic");
                          return f.q;
                        },
                        [&](const Linear& f) -> Vector {
                          require_size(n, f.c.size(), "linear");
                          return f.c;
                        },
                        [&](const auto&) -> Vector {
                          if (!has_affine_gradient())
                            fail(ErrorCode::UnsupportedKind, kind_name() + " has no affine gradient");
                          return Vector::Zero(n);
                        },
                    },
                    repr_);
}

namespace {

void put_vector(std::ostringstream& os, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) os << ' ' << format_real(v[i]);
}

Vector get_vector(std::istringstream& is, Index n, const std::string& spec) {
  Vector v(n);
  for (Index i = 0; i < n; ++i)
    if (!(is >> v[i])) fail(ErrorCode::ConfigError, "prox spec '" + spec + "' is truncated");
  return v;
}

}  // namespace

std::string ProxFunction::to_spec() const {
  std::ostringstream os;
  os << kind_name();
  std::visit(overloaded{
                 [&](const Zero&) {},
                 [&](const L1& f) { os << ' ' << format_real(f.weight); },
                 [&](const SquaredL2& f) {
                   os << ' ' << format_real(f.weight) << ' ' << (f.uniform ? 1 : f.center.size());
                   put_vector(os, f.center);
                   if (f.uniform) os << " uniform";
                 },
                 [&](const Quadratic& f) {
                   os << ' ' << f.q.size();
                   for (Index i = 0; i < f.P.rows(); ++i)
                     for (Index j = 0; j < f.P.cols(); ++j) os << ' ' << format_real(f.P(i, j));
                   put_vector(os, f.q);
                 },
                 [&](const Linear& f) {
                   os << ' ' << f.c.size();
                   put_vector(os, f.c);
                 },
                 [&](const Box& f) {
                   os << ' ' << (f.uniform ? 1 : f.lo.size());
                   put_vector(os, f.lo);
                   put_vector(os, f.hi);
                   if (f.uniform) os << " uniform";
                 },
                 [&](const Custom& f) {
                   fail(ErrorCode::UnsupportedKind, f.label + " cannot be serialized");
                 },
             },
             repr_);
  return os.str();
}

ProxFunction ProxFunction::parse_spec(const std::string& spec) {
  std::istringstream is(spec);
  std::string tag;
  if (!(is >> tag)) fail(ErrorCode::ConfigError, "empty prox spec");
  auto read_count = [&]() {
    long n = -1;
    if (!(is >> n) || n < 0) fail(ErrorCode::ConfigError, "prox spec '" + spec + "' needs a length");
    return static_cast<Index>(n);
  };
  auto trailing_uniform = [&]() {
    std::string word;
    if (is >> word) {
      if (word != "uniform") fail(ErrorCode::ConfigError, "unexpected '" + word + "' in prox spec");
      return true;
    }
    return false;
  };
  if (tag == "zero") return zero();
  if (tag == "l1") {
    double w;
    if (!(is >> w)) fail(ErrorCode::ConfigError, "l1 spec needs a weight");
    return l1(w);
  }
  if (tag == "squared_l2") {
    double w;
    if (!(is >> w)) fail(ErrorCode::ConfigError, "squared_l2 spec needs a weight");
    const Index n = read_count();
    Vector c = get_vector(is, n, spec);
    if (trailing_uniform()) return squared_l2(c[0], w);
    return squared_l2(c, w);
  }
  if (tag == "quadratic") {
    const Index n = read_count();
    Matrix P(n, n);
    for (Index i = 0; i < n; ++i) P.row(i) = get_vector(is, n, spec).transpose();
    return quadratic(P, get_vector(is, n, spec));
  }
  if (tag == "linear") {
    const Index n = read_count();
    return linear(get_vector(is, n, spec));
  }
  if (tag == "box") {
    const Index n = read_count();
    Vector lo = get_vector(is, n, spec);
    Vector hi = get_vector(is, n, spec);
    if (trailing_uniform()) return box(lo[0], hi[0]);
    return box(lo, hi);
  }
  fail(ErrorCode::UnsupportedKind, "unknown prox kind '" + tag + "'");
}

Vector prox(const ProxFunction& f, double tau, const Vector& y) { return f.prox(tau, y); }

Vector prox_conjugate(const ProxFunction& f, double sigma, const Vector& y) {
  if (!(sigma > 0.0)) fail(ErrorCode::ConfigError, "prox step must be positive");
  return y - sigma * f.prox(1.0 / sigma, y / sigma);
}

double prox_optimality_residual(const ProxFunction& f, double tau, const Vector& y, const Vector& p) {
  return f.subgradient_residual(p, (y - p) / tau);
}

}  // namespace gfbs
