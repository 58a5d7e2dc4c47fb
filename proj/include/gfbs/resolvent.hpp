#pragma once

#include <memory>
#include <vector>

#include <Eigen/QR>

#include "gfbs/operators.hpp"

namespace gfbs {

// Exact solver for the implicit step  d F(x) + K x  contains  r  where
// K = (linear part of A) + Q and F collects the diagonal terms of A.
//
// Affine diagonal terms are folded into K. The block dependency graph of K is
// split into strongly connected components, solved in dependency order: an
// all-affine component is one least-norm linear solve; a component with
// nonsmooth blocks has its affine blocks eliminated by a Schur complement, after
// which the nonsmooth blocks must be triangular with scalar diagonal c*I so that
// each one is a single prox evaluation. Anything else is rejected at
// construction. The plan is computed once.
class StructuredResolvent {
 public:
  StructuredResolvent(const MonotoneBlockOperator& A, const Matrix& Q);

  Vector solve(const Vector& r) const;
  const Matrix& system_matrix() const { return K_; }
  // Number of components and whether any linear solve is rank deficient
  // (a least-norm selection is then made).
  std::size_t num_stages() const { return stages_.size(); }
  bool makes_selection() const { return selection_; }

 private:
  struct ProxStep {
    Index block;
    std::vector<Index> coords;  // positions inside the stage's prox coordinate list
    double c;
  };
  struct Stage {
    std::vector<Index> prox_coords, affine_coords, all_coords;
    std::shared_ptr<Eigen::CompleteOrthogonalDecomposition<Matrix>> affine_solver;
    Matrix K_PF_KFFinv, K_FP, K_red;
    std::vector<ProxStep> prox_steps;
  };

  std::vector<BlockTerm> terms_;
  BlockLayout layout_;
  Matrix K_;
  Vector c_;
  std::vector<Stage> stages_;
  bool selection_ = false;
};

}  // namespace gfbs
