#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "gfbs/metric.hpp"
#include "gfbs/operators.hpp"
#include "gfbs/resolvent.hpp"

namespace gfbs {

// How x^{k+1} is formed from x^k and the G-FBS point x~^k.
struct Relaxation {
  enum class Kind { None, Scalar, Operator };
  Kind kind = Kind::None;
  double gamma = 1.0;
  Matrix M;

  static Relaxation none() { return {}; }
  static Relaxation scalar(double g) { return {Kind::Scalar, g, Matrix()}; }
  static Relaxation op(Matrix m) { return {Kind::Operator, 1.0, std::move(m)}; }
};

// Which of the two G matrices a fitting certifies: the degenerate-safe
// (1 - beta/(4 nu))(Q + Q^T) - M^T Q, or Q + Q^T - M^T Q - (beta/2) I.
enum class GForm { Degenerate, NonDegenerate };

// Objective h = f + g for the sufficient-decrease, objective-rate and descent
// checks; f is the smooth part with a beta-Lipschitz gradient.
struct Objective {
  std::function<double(const Vector&)> value;
  std::function<double(const Vector&)> smooth_value;
  std::function<Vector(const Vector&)> smooth_grad;
};

struct ModelOptions {
  GForm g_form = GForm::Degenerate;
  std::optional<double> declared_eta;
  std::optional<Objective> objective;
  double step_tol = 1e-8;  // relative tolerance of the inclusion-residual step certificate
  double psd_tol = -1.0;   // metric cutoff; negative selects the relative default
  // Optional replacement of the structured resolvent: returns x~ solving
  // d F(x~) + (L + Q) x~ contains r.
  std::function<Vector(const Vector&)> step_solver;
};

class SplittingModel {
 public:
  SplittingModel(MonotoneBlockOperator A, CocoerciveMap B, Matrix Q_raw, Relaxation relaxation = {},
                 ModelOptions options = {});

  const BlockLayout& layout() const { return A_.layout(); }
  Index dim() const { return A_.dim(); }
  const MonotoneBlockOperator& A() const { return A_; }
  const CocoerciveMap& B() const { return B_; }
  const Matrix& Q_raw() const { return Q_raw_; }
  const DegenerateMetric& Q() const { return Q_; }
  bool q_symmetric() const { return q_symmetric_; }
  const Relaxation& relaxation() const { return relax_; }
  const ModelOptions& options() const { return opts_; }
  double beta() const { return B_.beta; }
  double nu() const { return Q_.nu(); }

  // M as a matrix (gamma I for scalar relaxation, I when absent) and its inverse.
  const Matrix& M() const { return M_; }
  const Matrix& M_inv() const { return M_inv_; }
  // S = Q M^{-1}; s_metric() is null when S failed its symmetry/PSD build.
  const Matrix& S_raw() const { return S_raw_; }
  const DegenerateMetric* s_metric() const { return S_ ? S_.get() : nullptr; }
  const std::string& s_error() const { return s_error_; }
  Matrix G(GForm form) const;
  // M^{-T} G M^{-1} for the declared G form.
  const Matrix& H() const { return H_; }
  // Norm used for residuals and Fejer distances: S for operator relaxations, Q otherwise.
  double residual_norm(const Vector& d) const;
  bool uses_s_norm() const { return relax_.kind == Relaxation::Kind::Operator; }

  Vector solve_step(const Vector& rhs) const;
  bool step_makes_selection() const { return resolvent_ && resolvent_->makes_selection(); }

 private:
  MonotoneBlockOperator A_;
  CocoerciveMap B_;
  Matrix Q_raw_;
  DegenerateMetric Q_;
  bool q_symmetric_ = true;
  Relaxation relax_;
  ModelOptions opts_;
  Matrix M_, M_inv_, S_raw_, H_;
  std::shared_ptr<DegenerateMetric> S_;
  std::string s_error_;
  std::shared_ptr<StructuredResolvent> resolvent_;
};

}  // namespace gfbs
