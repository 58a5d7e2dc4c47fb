#pragma once

#include <functional>
#include <string>
#include <variant>

#include "gfbs/types.hpp"

namespace gfbs {

// Proximable convex function from a small closed catalog plus a callback escape
// hatch. Scalar-parameterized kinds (L1, uniform SquaredL2, uniform box) adapt to
// the length of their argument; vector-parameterized kinds require a match.
class ProxFunction {
 public:
  enum class Kind { Zero, L1, SquaredL2, Quadratic, Linear, IndicatorBox, Custom };

  struct CustomCallbacks {
    std::function<Vector(double, const Vector&)> prox;
    std::function<double(const Vector&)> value;
    // Distance-like measure of g from the subdifferential at x (0 iff g in df(x)).
    std::function<double(const Vector&, const Vector&)> subgradient_residual;
  };

  ProxFunction() : ProxFunction(Zero{}) {}

  static ProxFunction zero() { return ProxFunction(Zero{}); }
  static ProxFunction l1(double weight);
  // (weight/2) ||x - center||^2
  static ProxFunction squared_l2(Vector center, double weight = 1.0);
  static ProxFunction squared_l2(double uniform_center, double weight = 1.0);
  // (1/2) x^T P x + q^T x with P symmetric PSD
  static ProxFunction quadratic(Matrix P, Vector q);
  // <c, x>
  static ProxFunction linear(Vector c);
  static ProxFunction box(Vector lo, Vector hi);
  static ProxFunction box(double lo, double hi);
  static ProxFunction custom(CustomCallbacks callbacks, std::string label = "custom");

  Kind kind() const;
  std::string kind_name() const;

  double value(const Vector& x) const;
  Vector prox(double tau, const Vector& y) const;
  double subgradient_residual(const Vector& x, const Vector& g) const;

  // Kinds whose gradient is affine, grad f(x) = H x + g0: the step solver folds
  // these into its linear system instead of calling prox.
  bool has_affine_gradient() const;
  Matrix affine_hessian(Index n) const;
  Vector affine_offset(Index n) const;

  // Config text form "kind p1 p2 ..."; Custom functions are not serializable.
  std::string to_spec() const;
  static ProxFunction parse_spec(const std::string& spec);

 private:
  struct Zero {};
  struct L1 {
    double weight;
  };
  struct SquaredL2 {
    Vector center;
    double weight;
    bool uniform;
  };
  struct Quadratic {
    Matrix P;
    Vector q;
  };
  struct Linear {
    Vector c;
  };
  struct Box {
    Vector lo, hi;
    bool uniform;
  };
  struct Custom {
    CustomCallbacks cb;
    std::string label;
  };
  using Repr = std::variant<Zero, L1, SquaredL2, Quadratic, Linear, Box, Custom>;

  explicit ProxFunction(Repr r) : repr_(std::move(r)) {}

  Repr repr_;
};

Vector prox(const ProxFunction& f, double tau, const Vector& y);
// prox of sigma f^* through the Moreau decomposition.
Vector prox_conjugate(const ProxFunction& f, double sigma, const Vector& y);
// ||(y - p)/tau - df(p)|| style optimality residual of a computed prox point p.
double prox_optimality_residual(const ProxFunction& f, double tau, const Vector& y, const Vector& p);

}  // namespace gfbs
