#include "gfbs/engine.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "gfbs/errors.hpp"
#include "gfbs/matrix_io.hpp"

namespace gfbs {

namespace {

void check_dim(const SplittingModel& model, const Vector& x) {
  if (x.size() != model.dim())
    fail(ErrorCode::DimensionMismatch,
         "state of size " + std::to_string(x.size()) + " for a model of size " + std::to_string(model.dim()));
}

Vector certified_solve(const SplittingModel& model, const Vector& x, const Vector& rhs, const Vector& bx) {
  const Vector xt = model.solve_step(rhs);
  const Vector selection = model.Q_raw() * (x - xt) - bx;
  const double res = inclusion_residual(model.A(), xt, selection);
  const double scale = 1.0 + rhs.norm() + xt.norm();
  if (!(res <= model.options().step_tol * scale))
    fail(ErrorCode::SolverFailure, "step inclusion residual " + format_real(res) + " above tolerance");
  return xt;
}

}  // namespace

Vector gfbs_step(const SplittingModel& model, const Vector& x) {
  check_dim(model, x);
  const Vector bx = model.B()(x);
  return certified_solve(model, x, model.Q_raw() * x - bx, bx);
}

BlockVector gfbs_step(const SplittingModel& model, const BlockVector& x) {
  return BlockVector(model.layout(), gfbs_step(model, x.flatten()));
}

Vector gfbs_step_lemma(const SplittingModel& model, const Vector& x) {
  check_dim(model, x);
  const Vector bx = model.B()(x);
  const Vector y = x - model.Q().pinv_apply(bx);
  return certified_solve(model, x, model.Q_raw() * y, bx);
}

// gamma = 1 returns x~ itself so that unrelaxed and KM traces agree bit for bit.
Vector km_step(const SplittingModel& model, const Vector& x, double gamma) {
  Vector xt = gfbs_step(model, x);
  if (gamma == 1.0) return xt;
  return x + gamma * (xt - x);
}

BlockVector km_step(const SplittingModel& model, const BlockVector& x, double gamma) {
  return BlockVector(model.layout(), km_step(model, x.flatten(), gamma));
}

Vector relaxed_step(const SplittingModel& model, const Vector& x) {
  const Vector xt = gfbs_step(model, x);
  switch (model.relaxation().kind) {
    case Relaxation::Kind::None:
      return xt;
    case Relaxation::Kind::Scalar:
      if (model.relaxation().gamma == 1.0) return xt;
      return x + model.relaxation().gamma * (xt - x);
    case Relaxation::Kind::Operator:
      break;
  }
  return x + model.M() * (xt - x);
}

BlockVector relaxed_step(const SplittingModel& model, const BlockVector& x) {
  return BlockVector(model.layout(), relaxed_step(model, x.flatten()));
}

IterationTrace run(const SplittingModel& model, const Vector& x0, int max_iters, double stop_tol,
                   const RunOptions& options) {
  if (max_iters < 1) fail(ErrorCode::ConfigError, "max_iters must be at least 1");
  check_dim(model, x0);
  IterationTrace trace;
  trace.layout = model.layout();
  trace.residual_norm = model.uses_s_norm() ? "S" : "Q";
  trace.params = options.params;
  trace.selection_made = model.step_makes_selection();

  auto record = [&](const Vector& x) {
    trace.states.push_back(x);
    if (options.x_star) trace.s_distances.push_back(model.residual_norm(x - *options.x_star));
    if (options.objective) trace.objectives.push_back(options.objective(x));
    if (options.kkt) trace.kkt_residuals.push_back(options.kkt(x));
  };

  Vector x = x0;
  record(x);
  for (int k = 0; k < max_iters; ++k) {
    Vector next;
    try {
      next = relaxed_step(model, x);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SolverFailure)
        fail(ErrorCode::SolverFailure, "iteration " + std::to_string(k) + ": " + e.what());
      throw;
    }
    const double r = model.residual_norm(x - next);
    trace.q_residuals.push_back(r);
    record(next);
    x = std::move(next);
    if (!x.allFinite()) {
      trace.diverged = true;
      break;
    }
    if (r <= stop_tol) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  auto column = [](const std::vector<double>& v, std::size_t k) {
    return k < v.size() ? format_real(v[k]) : std::string("nan");
  };
  out << "iter,q_residual,s_distance,objective,kkt_residual\n";
  for (std::size_t k = 0; k < trace.q_residuals.size(); ++k) {
    out << k << ',' << format_real(trace.q_residuals[k]) << ',' << column(trace.s_distances, k) << ','
        << column(trace.objectives, k) << ',' << column(trace.kkt_residuals, k) << '\n';
  }
}

}  // namespace gfbs
