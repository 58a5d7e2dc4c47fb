#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfbs/model.hpp"

namespace gfbs {

// x~ with 0 in A x~ + B x + Q (x~ - x), certified by the inclusion residual.
Vector gfbs_step(const SplittingModel& model, const Vector& x);
BlockVector gfbs_step(const SplittingModel& model, const BlockVector& x);
// Same point through (A + Q)^{-1} Q (I - Q^dagger B); needs ran B in ran Q.
Vector gfbs_step_lemma(const SplittingModel& model, const Vector& x);

Vector km_step(const SplittingModel& model, const Vector& x, double gamma);
BlockVector km_step(const SplittingModel& model, const BlockVector& x, double gamma);
// x + M (x~ - x) for the model's relaxation (M = I when none is declared).
Vector relaxed_step(const SplittingModel& model, const Vector& x);
BlockVector relaxed_step(const SplittingModel& model, const BlockVector& x);

struct IterationTrace {
  BlockLayout layout;
  std::vector<Vector> states;       // x^0 .. x^K
  std::vector<double> q_residuals;  // ||x^k - x^{k+1}|| in the residual norm, k < K
  std::vector<double> s_distances;  // ||x^k - x*|| when a reference is supplied
  std::vector<double> objectives;
  std::vector<double> kkt_residuals;
  std::string residual_norm = "Q";
  bool converged = false;
  bool diverged = false;
  bool selection_made = false;  // a least-norm selection resolved a set-valued step
  std::map<std::string, std::string> params;

  std::size_t iterations() const { return q_residuals.size(); }
};

struct RunOptions {
  std::optional<Vector> x_star;
  std::function<double(const Vector&)> objective;
  std::function<double(const Vector&)> kkt;
  std::map<std::string, std::string> params;
};

IterationTrace run(const SplittingModel& model, const Vector& x0, int max_iters, double stop_tol,
                   const RunOptions& options = {});

// CSV: iter,q_residual,s_distance,objective,kkt_residual; one row per iteration,
// 17 significant digits, "nan" for columns that were not recorded.
void write_trace_csv(std::ostream& out, const IterationTrace& trace);

}  // namespace gfbs
