#include "gfbs/operators.hpp"

#include <cmath>

#include "gfbs/errors.hpp"

namespace gfbs {

Vector BlockTerm::prox(double t, const Vector& y) const {
  const Vector z = shift.size() ? Vector(y - t * shift) : y;
  if (scale == 0.0) return z;
  return conjugate ? prox_conjugate(fn, t * scale, z) : fn.prox(t * scale, z);
}

double BlockTerm::value(const Vector& x) const {
  if (conjugate) fail(ErrorCode::UnsupportedKind, "conjugate block has no closed-form value");
  double v = scale * fn.value(x);
  if (shift.size()) v += shift.dot(x);
  return v;
}

MonotoneBlockOperator::MonotoneBlockOperator(BlockLayout layout, std::vector<BlockTerm> terms, Matrix skew,
                                             Matrix extra_linear)
    : layout_(std::move(layout)), terms_(std::move(terms)), skew_(std::move(skew)), extra_(std::move(extra_linear)) {
  const Index n = layout_.total_dim();
  if (static_cast<Index>(terms_.size()) != layout_.num_blocks())
    fail(ErrorCode::DimensionMismatch, "one diagonal term per block required");
  if (skew_.size() == 0) skew_ = Matrix::Zero(n, n);
  if (extra_.size() == 0) extra_ = Matrix::Zero(n, n);
  if (skew_.rows() != n || skew_.cols() != n || extra_.rows() != n || extra_.cols() != n)
    fail(ErrorCode::DimensionMismatch, "coupling matrices must match the block layout");
  for (Index i = 0; i < layout_.num_blocks(); ++i)
    if (terms_[i].shift.size() && terms_[i].shift.size() != layout_.size(i))
      fail(ErrorCode::DimensionMismatch, "shift of block '" + layout_.name(i) + "' has wrong size");

  const double scale = std::max(1.0, skew_.cwiseAbs().maxCoeff());
  if ((skew_ + skew_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    fail(ErrorCode::NotSymmetric, "skew coupling is not antisymmetric");
  const double escale = std::max(1.0, extra_.cwiseAbs().maxCoeff());
  if ((extra_ - extra_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * escale)
    fail(ErrorCode::NotSymmetric, "extra linear part is not symmetric");
  const auto cert = psd_certificate(extra_, 1e-10 * escale);
  extra_psd_ = cert.is_psd;
  extra_min_eig_ = cert.min_eigenvalue;
}

double inclusion_residual(const MonotoneBlockOperator& A, const Vector& x_tilde, const Vector& selection) {
  if (x_tilde.size() != A.dim() || selection.size() != A.dim())
    fail(ErrorCode::DimensionMismatch, "inclusion_residual arguments do not match the operator");
  const Vector a = selection - A.skew() * x_tilde - A.extra_linear() * x_tilde;
  const BlockLayout& L = A.layout();
  double total = 0.0;
  for (Index i = 0; i < L.num_blocks(); ++i) {
    const BlockTerm& t = A.term(i);
    const auto xi = x_tilde.segment(L.offset(i), L.size(i));
    const auto ai = a.segment(L.offset(i), L.size(i));
    Vector r;
    if (t.is_affine()) {
      Vector grad = t.scale * (t.fn.affine_hessian(xi.size()) * xi + t.fn.affine_offset(xi.size()));
      if (t.shift.size()) grad += t.shift;
      r = ai - grad;
    } else {
      r = xi - t.prox(1.0, xi + ai);
    }
    total += r.squaredNorm();
  }
  return std::sqrt(total);
}

double inclusion_residual(const MonotoneBlockOperator& A, const BlockVector& x_tilde, const BlockVector& selection) {
  return inclusion_residual(A, x_tilde.flatten(), selection.flatten());
}

CheckReport cocoercivity_check(const CocoerciveMap& B, const std::vector<std::pair<Vector, Vector>>& pairs,
                               const DegenerateMetric* Q, double tol) {
  CheckReport report;
  if (B.beta == 0.0) {
    Check c;
    c.name = "cocoercive";
    c.worst_slack = 0.0;
    report.add(c);
    report.notes.push_back("beta = 0: cocoercivity holds vacuously");
    return report;
  }
  SlackTracker plain("cocoercive", tol);
  SlackTracker q_based("q_cocoercive", tol);
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    const auto& [x1, x2] = pairs[s];
    const Vector dx = x1 - x2;
    const Vector db = B(x1) - B(x2);
    plain.observe(db.squaredNorm() / B.beta, dx.dot(db), static_cast<long>(s));
    if (Q) {
      const Vector w = Q->pinv_apply(db);
      q_based.observe(Q->nu() / B.beta * Q->norm_sq(w), Q->inner(dx, w), static_cast<long>(s));
    }
  }
  report.add(plain.result());
  if (Q) report.add(q_based.result());
  return report;
}

}  // namespace gfbs
