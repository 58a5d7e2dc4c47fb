#include "gfbs/model.hpp"

#include <cmath>

#include "gfbs/errors.hpp"

namespace gfbs {

SplittingModel::SplittingModel(MonotoneBlockOperator A, CocoerciveMap B, Matrix Q_raw, Relaxation relaxation,
                               ModelOptions options)
    : A_(std::move(A)),
      B_(std::move(B)),
      Q_raw_(std::move(Q_raw)),
      Q_(DegenerateMetric::build(0.5 * (Q_raw_ + Q_raw_.transpose()), options.psd_tol)),
      relax_(std::move(relaxation)),
      opts_(std::move(options)) {
  const Index n = A_.dim();
  if (Q_raw_.rows() != n || Q_raw_.cols() != n) fail(ErrorCode::DimensionMismatch, "Q does not match the blocks");
  const double qscale = std::max(1.0, Q_raw_.cwiseAbs().maxCoeff());
  q_symmetric_ = (Q_raw_ - Q_raw_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * qscale;

  switch (relax_.kind) {
    case Relaxation::Kind::None:
      M_ = Matrix::Identity(n, n);
      break;
    case Relaxation::Kind::Scalar:
      if (relax_.gamma == 0.0) fail(ErrorCode::MNotInvertible, "relaxation gamma = 0");
      M_ = relax_.gamma * Matrix::Identity(n, n);
      break;
    case Relaxation::Kind::Operator:
      if (relax_.M.rows() != n || relax_.M.cols() != n) fail(ErrorCode::DimensionMismatch, "M does not match");
      M_ = relax_.M;
      break;
  }
  Eigen::FullPivLU<Matrix> lu(M_);
  if (!lu.isInvertible()) fail(ErrorCode::MNotInvertible, "relaxation operator M is singular");
  M_inv_ = lu.inverse();

  S_raw_ = Q_raw_ * M_inv_;
  try {
    S_ = std::make_shared<DegenerateMetric>(DegenerateMetric::build(S_raw_, opts_.psd_tol));
  } catch (const Error& e) {
    s_error_ = e.what();
  }
  H_ = M_inv_.transpose() * G(opts_.g_form) * M_inv_;

  if (opts_.step_solver) return;
  resolvent_ = std::make_shared<StructuredResolvent>(A_, Q_raw_);
}

Matrix SplittingModel::G(GForm form) const {
  const Index n = dim();
  const Matrix sym = Q_raw_ + Q_raw_.transpose();
  if (form == GForm::Degenerate) return (1.0 - beta() / (4.0 * nu())) * sym - M_.transpose() * Q_raw_;
  return sym - M_.transpose() * Q_raw_ - 0.5 * beta() * Matrix::Identity(n, n);
}

double SplittingModel::residual_norm(const Vector& d) const {
  if (uses_s_norm()) {
    // S may be only approximately symmetric; <S d, d> uses its symmetric part.
    return std::sqrt(std::max(0.0, d.dot(S_raw_ * d)));
  }
  return Q_.norm(d);
}

Vector SplittingModel::solve_step(const Vector& rhs) const {
  if (opts_.step_solver) return opts_.step_solver(rhs);
  return resolvent_->solve(rhs);
}

}  // namespace gfbs
