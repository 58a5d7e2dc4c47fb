#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "gfbs/engine.hpp"
#include "gfbs/report.hpp"

namespace gfbs {

struct StaticOptions {
  int samples = 100;
  std::uint64_t seed = 0x5eed;
  double tol = 1e-8;
  double sample_scale = 1.0;  // standard deviation of the sampled points
};

// PSD certificates for Q, S and G; nu, alpha and the nu > beta/2 flag; the eta
// estimate; sampled averagedness; sampled degenerate descent lemma; range inclusion.
CertificateReport certify_static(const SplittingModel& model, const StaticOptions& options = {});

struct TraceOptions {
  double tol = 1e-8;
  std::map<std::string, double> tolerances;  // per-check overrides
  std::optional<double> eta;                 // overrides the model's declared eta
  std::optional<Objective> objective;        // overrides the model's objective

  double tolerance(const std::string& check) const {
    auto it = tolerances.find(check);
    return it == tolerances.end() ? tol : it->second;
  }
};

// Per-iteration checks: fejer, residual_monotone, rate_envelope,
// sufficient_decrease(_nonconvex), objective_rate, eta_condition.
CertificateReport certify_trace(const IterationTrace& trace, const SplittingModel& model, const Vector& x_star,
                                const TraceOptions& options = {});

}  // namespace gfbs
