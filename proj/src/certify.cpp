#include "gfbs/certify.hpp"

#include <cmath>
#include <limits>

#include "gfbs/errors.hpp"
#include "gfbs/rng.hpp"

namespace gfbs {

namespace {

double effective_gamma(const SplittingModel& model) {
  return model.relaxation().kind == Relaxation::Kind::Scalar ? model.relaxation().gamma : 1.0;
}

// Largest eta with H >= eta S when S is positive definite; empty otherwise.
std::optional<double> static_eta(const Matrix& H, const DegenerateMetric* S) {
  if (!S || S->rank() < S->dim()) return std::nullopt;
  const Vector inv_sqrt = S->eig_values().cwiseSqrt().cwiseInverse();
  const Matrix W = S->eig_basis() * inv_sqrt.asDiagonal();
  const Matrix Hs = 0.5 * (H + H.transpose());
  return psd_certificate(W.transpose() * Hs * W, 0.0).min_eigenvalue;
}

}  // namespace

CertificateReport certify_static(const SplittingModel& model, const StaticOptions& options) {
  CertificateReport report;
  const double beta = model.beta();
  const double nu = model.nu();
  const Index n = model.dim();
  const double tol = options.tol;
  const double psd_tol = 1e-10 * std::max(1.0, model.Q_raw().cwiseAbs().maxCoeff());

  // (a) PSD certificates.
  const auto q_cert = psd_certificate(model.Q().matrix(), psd_tol);
  report.add(flag_check("Q_psd", q_cert.is_psd, q_cert.min_eigenvalue));
  if (model.relaxation().kind != Relaxation::Kind::None) {
    const Matrix& S = model.S_raw();
    const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
    const double s_tol = 1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff());
    report.add(flag_check("S_symmetric", asym <= s_tol, -asym));
    const auto s_cert = psd_certificate(S, s_tol);
    report.add(flag_check("S_psd", s_cert.is_psd, s_cert.min_eigenvalue));
  }
  for (GForm form : {GForm::Degenerate, GForm::NonDegenerate}) {
    const Matrix G = model.G(form);
    const auto g_cert = psd_certificate(G, 1e-10 * std::max(1.0, G.cwiseAbs().maxCoeff()));
    Check c = flag_check(form == GForm::Degenerate ? "G_psd" : "G_nondegenerate_psd", g_cert.is_psd,
                         g_cert.min_eigenvalue);
    // Only the form the fitting declares gates the verdict.
    c.informational = form != model.options().g_form;
    if (c.informational) c.value = g_cert.min_eigenvalue;
    report.add(c);
  }
  report.add(flag_check("A_monotone", model.A().extra_linear_psd(), model.A().extra_linear_min_eigenvalue()));

  // (b) nu, beta, averagedness.
  report.add(info_check("nu", nu));
  report.add(info_check("beta", beta));
  if (4.0 * nu > beta) report.add(info_check("alpha", 2.0 * nu / (4.0 * nu - beta)));
  const double margin = nu - beta / 2.0;
  report.add(flag_check("nu > beta/2", margin > 1e-12 * std::max(nu, beta), margin));

  // (c) eta.
  if (model.relaxation().kind != Relaxation::Kind::Operator) {
    const double g = effective_gamma(model);
    const double eta = (2.0 - beta / (2.0 * nu) - g) / g;
    report.add(info_check("eta", eta));
    report.add(flag_check("eta > 0", eta > 0.0, eta));
  } else {
    if (model.options().declared_eta) report.add(info_check("eta", *model.options().declared_eta));
    if (auto e = static_eta(model.H(), model.s_metric())) report.add(info_check("eta_static", *e));
  }

  // (d)-(f) sampled checks.
  SplitMix64 rng(options.seed);
  std::vector<std::pair<Vector, Vector>> pairs;
  for (int s = 0; s < options.samples; ++s) {
    Vector a = options.sample_scale * rng.normal_vector(n);
    Vector b = options.sample_scale * rng.normal_vector(n);
    pairs.emplace_back(std::move(a), std::move(b));
  }
  const DegenerateMetric& Q = model.Q();

  if (model.q_symmetric()) {
    SlackTracker avg("averaged_sampled", tol);
    try {
      for (std::size_t s = 0; s < pairs.size(); ++s) {
        const auto& [x1, x2] = pairs[s];
        const Vector t1 = gfbs_step(model, x1), t2 = gfbs_step(model, x2);
        const Vector dr = (x1 - t1) - (x2 - t2);
        avg.observe(Q.norm_sq(t1 - t2) + (1.0 - beta / (2.0 * nu)) * Q.norm_sq(dr), Q.norm_sq(x1 - x2),
                    static_cast<long>(s));
      }
      report.add(avg.result());
    } catch (const Error& e) {
      report.add(flag_check("averaged_sampled", false, std::nan("")));
      report.notes.push_back(std::string("averaged_sampled: ") + e.what());
    }
  } else {
    report.notes.push_back("averaged_sampled skipped: Q is not symmetric");
  }

  const auto& obj = model.options().objective;
  if (obj && obj->smooth_value && obj->smooth_grad) {
    SlackTracker descent("descent_lemma", tol);
    for (std::size_t s = 0; s < pairs.size(); ++s) {
      const auto& [x1, x2] = pairs[s];
      const Vector d = x2 - x1;
      const double rhs = obj->smooth_value(x1) + Q.apply(d).dot(Q.pinv_apply(obj->smooth_grad(x1))) +
                         beta / (2.0 * nu) * Q.norm_sq(d);
      descent.observe(obj->smooth_value(x2), rhs, static_cast<long>(s));
    }
    report.add(descent.result());
  }

  SlackTracker range("range_inclusion", 0.0);
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    const Vector bx = model.B()(pairs[s].first);
    const double off = (bx - Q.range_project(bx)).norm();
    range.observe_slack(1e-8 * (1.0 + bx.norm()) - off, static_cast<long>(s));
  }
  report.add(range.result());
  return report;
}

CertificateReport certify_trace(const IterationTrace& trace, const SplittingModel& model, const Vector& x_star,
                                const TraceOptions& options) {
  if (x_star.size() == 0) fail(ErrorCode::MissingOracle, "certify_trace needs a reference solution");
  if (x_star.size() != model.dim()) fail(ErrorCode::DimensionMismatch, "reference solution has wrong size");
  CertificateReport report;
  const std::size_t K = trace.iterations();
  if (K == 0) {
    report.notes.push_back("empty trace");
    return report;
  }
  const double beta = model.beta();
  const double nu = model.nu();
  const bool op = model.uses_s_norm();
  const double gamma = effective_gamma(model);
  const DegenerateMetric& Q = model.Q();
  const auto& X = trace.states;

  auto dist = [&](std::size_t k) { return model.residual_norm(X[k] - x_star); };
  std::vector<double> step(K), d(K + 1);
  for (std::size_t k = 0; k < K; ++k) step[k] = model.residual_norm(X[k] - X[k + 1]);
  for (std::size_t k = 0; k <= K; ++k) d[k] = dist(k);

  // ||x^k - x^{k+1}||_S^2; for scalar relaxations S = Q / gamma.
  auto s_norm_sq = [&](std::size_t k) { return op ? step[k] * step[k] : step[k] * step[k] / gamma; };

  // Empirical eta along the trajectory.
  double eta_emp = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    const Vector dx = X[k] - X[k + 1];
    const double s_sq = s_norm_sq(k);
    if (s_sq > 1e-20) eta_emp = std::min(eta_emp, dx.dot(model.H() * dx) / s_sq);
  }
  std::optional<double> eta = options.eta;
  if (!eta) eta = model.options().declared_eta;
  if (!op) eta = (2.0 - beta / (2.0 * nu) - gamma) / gamma;

  // (1) Fejer monotonicity.
  {
    SlackTracker t("fejer", options.tolerance("fejer"));
    const double c = (2.0 - gamma - beta / (2.0 * nu)) / gamma;
    for (std::size_t k = 0; k < K; ++k) {
      const Vector dx = X[k] - X[k + 1];
      const double decrease = op ? dx.dot(model.H() * dx) : c * Q.norm_sq(dx);
      t.observe(d[k + 1] * d[k + 1], d[k] * d[k] - decrease, static_cast<long>(k));
    }
    report.add(t.result());
  }
  // (2) Residual monotonicity.
  {
    SlackTracker t("residual_monotone", options.tolerance("residual_monotone"));
    for (std::size_t k = 0; k + 1 < K; ++k) t.observe(step[k + 1], step[k], static_cast<long>(k));
    report.add(t.result());
  }
  // (3) Rate envelope.
  {
    SlackTracker t("rate_envelope", options.tolerance("rate_envelope"));
    std::optional<double> eta_rate = eta;
    if (op && !eta_rate) {
      eta_rate = eta_emp;
      report.notes.push_back("rate_envelope uses the empirical eta (none declared)");
    }
    if (eta_rate && *eta_rate > 0.0 && std::isfinite(*eta_rate)) {
      const double C = 1.0 / std::sqrt(*eta_rate);
      for (std::size_t k = 0; k < K; ++k)
        t.observe(step[k] * std::sqrt(static_cast<double>(k + 1)), C * d[0], static_cast<long>(k));
    } else {
      t.observe_slack(std::nan(""), 0);
      report.notes.push_back("rate_envelope: no positive eta, bound not applicable");
    }
    report.add(t.result());
    report.notes.push_back("o(1/sqrt(k)) refinement not checked (asymptotic, informational only)");
  }
  // (4)-(5) Objective-based checks, plain iteration only.
  std::optional<Objective> obj = options.objective ? options.objective : model.options().objective;
  const bool plain = !op && gamma == 1.0;
  if (obj && obj->value && plain) {
    std::vector<double> h(K + 1);
    for (std::size_t k = 0; k <= K; ++k) h[k] = obj->value(X[k]);
    SlackTracker convex("sufficient_decrease", options.tolerance("sufficient_decrease"));
    SlackTracker nonconvex("sufficient_decrease_nonconvex", options.tolerance("sufficient_decrease_nonconvex"));
    for (std::size_t k = 0; k < K; ++k) {
      const double s_sq = Q.norm_sq(X[k + 1] - X[k]);
      convex.observe((1.0 - beta / (2.0 * nu)) * s_sq, h[k] - h[k + 1], static_cast<long>(k));
      nonconvex.observe(0.5 * (1.0 - beta / nu) * s_sq, h[k] - h[k + 1], static_cast<long>(k));
    }
    report.add(convex.result());
    report.add(nonconvex.result());
    if (nu >= beta) {
      SlackTracker rate("objective_rate", options.tolerance("objective_rate"));
      const double h_star = obj->value(x_star);
      const double r0 = Q.norm_sq(X[0] - x_star);
      for (std::size_t k = 1; k <= K; ++k)
        rate.observe(h[k] - h_star, r0 / (2.0 * static_cast<double>(k)), static_cast<long>(k));
      report.add(rate.result());
    } else {
      report.notes.push_back("objective_rate skipped: requires nu >= beta");
    }
  } else if (!obj) {
    report.notes.push_back("sufficient_decrease/objective_rate skipped: no objective declared");
  } else {
    report.notes.push_back("sufficient_decrease/objective_rate skipped: relaxed iteration");
  }
  // (6) eta-condition along the trajectory.
  {
    SlackTracker t("eta_condition", options.tolerance("eta_condition"));
    if (eta) {
      for (std::size_t k = 0; k < K; ++k) {
        const Vector dx = X[k] - X[k + 1];
        t.observe(*eta * s_norm_sq(k), dx.dot(model.H() * dx), static_cast<long>(k));
      }
    } else {
      report.notes.push_back("eta_condition checked against the empirical eta");
      t.observe_slack(eta_emp > 0.0 ? 0.0 : eta_emp, 0);
    }
    report.add(t.result());
    if (std::isfinite(eta_emp)) report.add(info_check("eta_empirical", eta_emp));
  }
  return report;
}

}  // namespace gfbs
