#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gfbs/block_vector.hpp"
#include "gfbs/cocoercive.hpp"
#include "gfbs/metric.hpp"
#include "gfbs/prox.hpp"
#include "gfbs/report.hpp"

namespace gfbs {

// Diagonal entry psi(x) = scale * phi(x) + <shift, x>, where phi is fn or its
// conjugate fn^*. The block contributes d psi to the monotone operator.
struct BlockTerm {
  ProxFunction fn;
  bool conjugate = false;
  double scale = 1.0;
  Vector shift;  // empty means zero

  static BlockTerm of(ProxFunction f, double scale = 1.0) { return BlockTerm{std::move(f), false, scale, {}}; }
  static BlockTerm conj(ProxFunction f, double scale = 1.0) { return BlockTerm{std::move(f), true, scale, {}}; }
  BlockTerm& with_shift(Vector s) {
    shift = std::move(s);
    return *this;
  }

  bool is_affine() const { return !conjugate && fn.has_affine_gradient(); }
  // prox_{t psi}(y)
  Vector prox(double t, const Vector& y) const;
  double value(const Vector& x) const;
};

// A = blkdiag(d psi_i) + L with L = skew + extra_linear, skew antisymmetric.
class MonotoneBlockOperator {
 public:
  MonotoneBlockOperator(BlockLayout layout, std::vector<BlockTerm> terms, Matrix skew, Matrix extra_linear = Matrix());

  const BlockLayout& layout() const { return layout_; }
  Index dim() const { return layout_.total_dim(); }
  const std::vector<BlockTerm>& terms() const { return terms_; }
  const BlockTerm& term(Index i) const { return terms_[i]; }
  const Matrix& skew() const { return skew_; }
  const Matrix& extra_linear() const { return extra_; }
  Matrix linear_part() const { return skew_ + extra_; }
  // False when extra_linear fails its PSD certificate (A is then not monotone).
  bool extra_linear_psd() const { return extra_psd_; }
  double extra_linear_min_eigenvalue() const { return extra_min_eig_; }

 private:
  BlockLayout layout_;
  std::vector<BlockTerm> terms_;
  Matrix skew_;
  Matrix extra_;
  bool extra_psd_ = true;
  double extra_min_eig_ = 0.0;
};

// Nonnegative violation of "selection in A(x_tilde)": natural prox residual for
// nonsmooth blocks, exact algebra for affine blocks.
double inclusion_residual(const MonotoneBlockOperator& A, const Vector& x_tilde, const Vector& selection);
double inclusion_residual(const MonotoneBlockOperator& A, const BlockVector& x_tilde, const BlockVector& selection);

// Sampled cocoercivity of B and, given Q, Q-based (nu/beta)-cocoercivity of Q^dagger B.
CheckReport cocoercivity_check(const CocoerciveMap& B, const std::vector<std::pair<Vector, Vector>>& pairs,
                               const DegenerateMetric* Q = nullptr, double tol = 1e-10);

}  // namespace gfbs
