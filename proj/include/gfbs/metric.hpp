#pragma once

#include <utility>
#include <vector>

#include "gfbs/block_vector.hpp"
#include "gfbs/cocoercive.hpp"
#include "gfbs/report.hpp"
#include "gfbs/types.hpp"

namespace gfbs {

// Symmetric positive semi-definite metric Q, possibly singular. The
// eigendecomposition is computed once; eigenvalues at or below psd_tol are set
// to exactly zero and define the kernel.
class DegenerateMetric {
 public:
  // psd_tol < 0 selects the relative default 1e-10 * max |eigenvalue|.
  static DegenerateMetric build(const Matrix& matrix, double psd_tol = -1.0);

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  Index rank() const { return rank_; }
  double nu() const { return nu_; }
  double max_eigenvalue() const { return eig_values_.size() ? eig_values_.maxCoeff() : 0.0; }
  const Matrix& eig_basis() const { return eig_basis_; }
  const Vector& eig_values() const { return eig_values_; }
  double psd_tol() const { return psd_tol_; }

  Vector apply(const Vector& x) const;
  double inner(const Vector& x, const Vector& y) const;
  double norm_sq(const Vector& x) const;
  double norm(const Vector& x) const;
  Vector pinv_apply(const Vector& y) const;
  Vector range_project(const Vector& y) const;
  // Q^{1/2} in the same eigenbasis; exposed for testing.
  Vector sqrt_apply(const Vector& x) const;

 private:
  void check_dim(Index n) const;

  Matrix matrix_;
  Matrix eig_basis_;
  Vector eig_values_;
  Matrix range_basis_;  // eigenvectors of the strictly positive eigenvalues
  Vector range_values_;
  Index rank_ = 0;
  double nu_ = 0.0;
  double psd_tol_ = 0.0;
};

DegenerateMetric build_metric(const Matrix& matrix, double psd_tol = -1.0);
double q_norm(const DegenerateMetric& Q, const BlockVector& x);
BlockVector pinv_apply(const DegenerateMetric& Q, const BlockVector& y);
BlockVector range_project(const DegenerateMetric& Q, const BlockVector& y);

struct PsdCertificate {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
};

// Tests the symmetric part (M + M^T)/2.
PsdCertificate psd_certificate(const Matrix& M, double tol = 1e-10);

// Sampled check of the three range-based inequalities relating B, Q^dagger and nu.
// Throws RangeViolation if some sampled Bx leaves ran Q.
CheckReport verify_fact_f1(const DegenerateMetric& Q, const CocoerciveMap& B,
                           const std::vector<std::pair<Vector, Vector>>& samples,
                           const std::vector<double>& eta_grid, double tol = 1e-10);

}  // namespace gfbs
