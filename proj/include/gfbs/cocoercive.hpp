#pragma once

#include <functional>

#include "gfbs/types.hpp"

namespace gfbs {

// Single-valued 1/beta-cocoercive map B. beta = 0 declares the zero map.
struct CocoerciveMap {
  std::function<Vector(const Vector&)> eval;
  double beta = 0.0;

  Vector operator()(const Vector& x) const { return eval ? eval(x) : Vector::Zero(x.size()); }
  bool is_zero() const { return beta == 0.0; }

  static CocoerciveMap zero();
  // B(x) = L x + c with L symmetric PSD; beta = largest eigenvalue of L.
  static CocoerciveMap affine(const Matrix& L, const Vector& c);
  static CocoerciveMap linear(const Matrix& L) { return affine(L, Vector::Zero(L.rows())); }
};

}  // namespace gfbs
