#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "gfbs/types.hpp"

namespace gfbs {

enum class ProblemKind { EqualityQP, Lasso, TV1D, TwoBlockADMM };

const char* problem_kind_name(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& name);

// Meaning per kind:
//   EqualityQP   min 1/2 x'Px + q'x  s.t. Ax = c          n variables, m constraints
//   Lasso        min 1/2 ||Mx - b||^2 + lambda ||x||_1    n variables, p observations
//   TV1D         min 1/2 ||u - b||^2 + lambda ||Du||_1    n samples, D = (forward difference)/2
//   TwoBlockADMM min 1/2 u'Pu + q'u + 1/2 v'Rv + r'v  s.t. Au + Bv = c
//                                                         n = dim u, p = dim v, m constraints
struct ProblemDims {
  Index n = 0;
  Index m = 0;
  Index p = 0;
};

struct ProblemInstance {
  ProblemKind kind = ProblemKind::EqualityQP;
  std::uint64_t seed = 0;
  ProblemDims dims;
  double lambda = 0.0;
  std::map<std::string, Matrix> data;  // vectors stored as single columns

  const Matrix& mat(const std::string& name) const;
  Vector vec(const std::string& name) const;
  bool has(const std::string& name) const { return data.count(name) > 0; }
};

ProblemInstance generate(ProblemKind kind, std::uint64_t seed, ProblemDims dims);
ProblemDims default_dims(ProblemKind kind);

// Direct constructors for hand-written instances.
ProblemInstance make_equality_qp(const Matrix& P, const Vector& q, const Matrix& A, const Vector& c);
ProblemInstance make_lasso(const Matrix& M, const Vector& b, double lambda);
ProblemInstance make_tv1d(const Vector& b, double lambda);
ProblemInstance make_two_block(const Matrix& P, const Vector& q, const Matrix& R, const Vector& r, const Matrix& A,
                               const Matrix& B, const Vector& c);
Matrix tv_difference(Index n);

// x_star is the primal point ((u, v) stacked for TwoBlockADMM); dual follows the
// sign conventions of kkt_residual.
struct OracleSolution {
  Vector x_star;
  Vector dual;
  double kkt_residual = 0.0;
};

OracleSolution oracle_solve(const ProblemInstance& problem);
// Unregularized least squares min 1/2 ||Mx - b||^2 (Lasso) or unconstrained
// quadratic min 1/2 x'Px + q'x (EqualityQP).
Vector smooth_minimizer(const ProblemInstance& problem);
// Largest eigenvalue of the symmetric part of H.
double psd_lipschitz(const Matrix& H);

struct KktTerms {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double total() const;
};

// Conventions:
//   EqualityQP    Px + q - A's = 0,  Ax = c              (duals = s)
//   Lasso         -M'(Mx - b) in lambda d||x||_1         (duals unused)
//   TV1D          u - b + D's = 0,  s in lambda d||.||_1(Du)   (duals = s)
//   TwoBlockADMM  Pu + q - A'p = 0, Rv + r - B'p = 0, Au + Bv = c   (duals = p)
KktTerms kkt_terms(const ProblemInstance& problem, const Vector& x, const Vector& duals);
double kkt_residual(const ProblemInstance& problem, const Vector& x, const Vector& duals);

void write_instance(std::ostream& out, const ProblemInstance& problem);
ProblemInstance read_instance(std::istream& in);

}  // namespace gfbs
