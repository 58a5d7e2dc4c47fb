#include "gfbs/zoo.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "gfbs/errors.hpp"
#include "gfbs/matrix_io.hpp"
#include "gfbs/rng.hpp"

namespace gfbs {

namespace {

struct NameEntry {
  AlgorithmName name;
  const char* text;
};

constexpr NameEntry kNames[] = {
    {AlgorithmName::RelaxedADMM, "RelaxedADMM"},
    {AlgorithmName::ProximalADMM, "ProximalADMM"},
    {AlgorithmName::GradientDescent, "GradientDescent"},
    {AlgorithmName::ClassicalPPA, "ClassicalPPA"},
    {AlgorithmName::ProximalFBS, "ProximalFBS"},
    {AlgorithmName::ChambollePock, "ChambollePock"},
    {AlgorithmName::AriasCombettes, "AriasCombettes"},
    {AlgorithmName::DykstraDual, "DykstraDual"},
    {AlgorithmName::PAPC, "PAPC"},
    {AlgorithmName::AFBA, "AFBA"},
    {AlgorithmName::CondatI, "CondatI"},
    {AlgorithmName::CondatII, "CondatII"},
    {AlgorithmName::ALM, "ALM"},
    {AlgorithmName::LinearizedALM, "LinearizedALM"},
    {AlgorithmName::LinearizedBregman, "LinearizedBregman"},
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Lipschitz constant of the smooth part each template differentiates.
double smooth_beta(const ProblemInstance& pb) {
  switch (pb.kind) {
    case ProblemKind::Lasso: {
      const Matrix& M = pb.mat("M");
      return psd_lipschitz(M.transpose() * M);
    }
    case ProblemKind::EqualityQP:
      return psd_lipschitz(pb.mat("P"));
    default:
      return 1.0;
  }
}

const Matrix& coupling(const ProblemInstance& pb) {
  return pb.kind == ProblemKind::TV1D ? pb.mat("D") : pb.mat("A");
}

}  // namespace

const char* algorithm_name(AlgorithmName name) {
  for (const auto& e : kNames)
    if (e.name == name) return e.text;
  return "unknown";
}

AlgorithmName parse_algorithm_name(const std::string& name) {
  const std::string key = lower(name);
  for (const auto& e : kNames)
    if (lower(e.text) == key) return e.name;
  if (key == "gd") return AlgorithmName::GradientDescent;
  if (key == "ppa") return AlgorithmName::ClassicalPPA;
  if (key == "pfbs") return AlgorithmName::ProximalFBS;
  if (key == "cp") return AlgorithmName::ChambollePock;
  if (key == "lalm") return AlgorithmName::LinearizedALM;
  if (key == "lb") return AlgorithmName::LinearizedBregman;
  fail(ErrorCode::ConfigError, "unknown algorithm '" + name + "'");
}

const std::vector<AlgorithmName>& all_algorithms() {
  static const std::vector<AlgorithmName> names = [] {
    std::vector<AlgorithmName> v;
    for (const auto& e : kNames) v.push_back(e.name);
    return v;
  }();
  return names;
}

bool Admissibility::ok() const {
  return std::none_of(ranges.begin(), ranges.end(), [](const ParamRange& r) { return r.violated(); });
}

std::vector<std::string> Admissibility::violations() const {
  std::vector<std::string> out;
  for (const auto& r : ranges)
    if (r.violated()) out.push_back(r.name + " = " + format_real(r.value) + " violates " + r.condition);
  return out;
}

ProblemKind default_problem(AlgorithmName name) {
  switch (name) {
    case AlgorithmName::RelaxedADMM:
    case AlgorithmName::ProximalADMM:
      return ProblemKind::TwoBlockADMM;
    case AlgorithmName::GradientDescent:
    case AlgorithmName::ClassicalPPA:
    case AlgorithmName::ProximalFBS:
      return ProblemKind::Lasso;
    case AlgorithmName::ALM:
    case AlgorithmName::LinearizedALM:
    case AlgorithmName::LinearizedBregman:
      return ProblemKind::EqualityQP;
    default:
      return ProblemKind::TV1D;
  }
}

bool supports_problem(AlgorithmName name, ProblemKind kind) {
  switch (name) {
    case AlgorithmName::GradientDescent:
    case AlgorithmName::ClassicalPPA:
      return kind == ProblemKind::Lasso || kind == ProblemKind::EqualityQP;
    default:
      return kind == default_problem(name);
  }
}

ParamMap default_params(AlgorithmName name, const ProblemInstance& pb) {
  if (!supports_problem(name, pb.kind))
    fail(ErrorCode::IncompatibleProblem,
         std::string(algorithm_name(name)) + " does not accept " + problem_kind_name(pb.kind) + " problems");
  const double beta = smooth_beta(pb);
  switch (name) {
    case AlgorithmName::RelaxedADMM:
      return {{"tau", 1.0}, {"gamma", 1.0}};
    case AlgorithmName::ProximalADMM:
      return {{"tau", 1.0}, {"p1", 1.0}, {"p2", 1.0}};
    case AlgorithmName::GradientDescent:
      return {{"tau", 1.0 / beta}};
    case AlgorithmName::ClassicalPPA:
      return {{"tau", 1.0}, {"gamma", 1.0}};
    case AlgorithmName::ProximalFBS:
      return {{"tau", 1.0 / beta}, {"gamma", 1.0}};
    case AlgorithmName::ChambollePock: {
      const double a = std::sqrt(zoo_detail::spectral_norm_sq(coupling(pb)));
      return {{"sigma", 0.9 / a}, {"tau", 0.9 / a}};
    }
    case AlgorithmName::AriasCombettes:
      return {{"tau", 0.9 / std::sqrt(zoo_detail::spectral_norm_sq(coupling(pb)))}};
    case AlgorithmName::DykstraDual:
      return {{"tau", 1.0 / zoo_detail::spectral_norm_sq(coupling(pb))}, {"gamma", 1.0}};
    case AlgorithmName::PAPC:
    case AlgorithmName::AFBA:
      return {{"sigma", 0.5}, {"tau", 0.5}};
    case AlgorithmName::CondatI:
    case AlgorithmName::CondatII:
      return {{"sigma", 0.5}, {"tau", 0.5}, {"gamma", 1.0}};
    case AlgorithmName::ALM:
      return {{"tau", 1.0}};
    case AlgorithmName::LinearizedALM:
      return {{"tau", 1.0}, {"rho", 2.0 * zoo_detail::spectral_norm_sq(coupling(pb))}};
    case AlgorithmName::LinearizedBregman:
      return {{"tau", 1.0}, {"rho", 0.5 / zoo_detail::spectral_norm_sq(coupling(pb))}};
  }
  return {};
}

AlgorithmFitting build(AlgorithmName name, const ProblemInstance& problem, const ParamMap& params,
                       const BuildOptions& options) {
  if (!supports_problem(name, problem.kind))
    fail(ErrorCode::IncompatibleProblem,
         std::string(algorithm_name(name)) + " does not accept " + problem_kind_name(problem.kind) + " problems");
  // tau_beta = tau * beta is accepted wherever tau scales against a gradient.
  ParamMap p = params;
  if (!p.count("tau") && p.count("tau_beta")) p["tau"] = p["tau_beta"] / smooth_beta(problem);

  AlgorithmFitting fit;
  switch (name) {
    case AlgorithmName::RelaxedADMM:
    case AlgorithmName::ProximalADMM:
      fit = zoo_detail::build_admm(name, problem, p);
      break;
    case AlgorithmName::GradientDescent:
    case AlgorithmName::ClassicalPPA:
    case AlgorithmName::ProximalFBS:
    case AlgorithmName::DykstraDual:
      fit = zoo_detail::build_gradient(name, problem, p);
      break;
    case AlgorithmName::ALM:
    case AlgorithmName::LinearizedALM:
    case AlgorithmName::LinearizedBregman:
      fit = zoo_detail::build_lagrangian(name, problem, p);
      break;
    default:
      fit = zoo_detail::build_primal_dual(name, problem, p);
      break;
  }
  fit.name = name;
  fit.problem = problem;
  fit.params = p;
  if (!options.with_oracle) fit.x_star = Vector();
  return fit;
}

Vector initial_point(const AlgorithmFitting& fitting, std::uint64_t seed) {
  const Index n = fitting.model->dim();
  auto it = fitting.params.find("x0");
  if (it != fitting.params.end()) return Vector::Constant(n, it->second);
  SplitMix64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  return rng.normal_vector(n);
}

double equivalence_report(const AlgorithmFitting& fitting, const Vector& x0, int k) {
  if (k < 1) fail(ErrorCode::ConfigError, "equivalence_report needs k >= 1");
  if (!fitting.make_native) fail(ErrorCode::UnsupportedKind, "fitting has no native implementation");
  auto native = fitting.make_native();
  native->reset(x0);
  Vector x = x0;
  double worst = (native->engine_view() - x).cwiseAbs().maxCoeff();
  for (int j = 0; j < k; ++j) {
    x = relaxed_step(fitting.engine(), x);
    native->step();
    const double dev = (native->engine_view() - x).cwiseAbs().maxCoeff();
    if (!std::isfinite(dev)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, dev);
  }
  return worst;
}

RunOptions run_options(const AlgorithmFitting& fitting) {
  RunOptions opts;
  if (fitting.x_star.size() > 0) opts.x_star = fitting.x_star;
  const auto& obj = fitting.model->options().objective;
  if (obj && obj->value) opts.objective = obj->value;
  opts.kkt = fitting.kkt;
  opts.params["algo"] = algorithm_name(fitting.name);
  opts.params["problem"] = problem_kind_name(fitting.problem.kind);
  opts.params["seed"] = std::to_string(fitting.problem.seed);
  for (const auto& [key, value] : fitting.params) opts.params[key] = format_real(value);
  return opts;
}

namespace {

// The trace with its first `start` iterates dropped (re-indexed from zero).
IterationTrace drop_prefix(const IterationTrace& trace, std::size_t start) {
  IterationTrace out = trace;
  auto cut = [start](auto& v) { v.erase(v.begin(), v.begin() + static_cast<long>(std::min(start, v.size()))); };
  cut(out.states);
  cut(out.q_residuals);
  cut(out.s_distances);
  cut(out.objectives);
  cut(out.kkt_residuals);
  return out;
}

}  // namespace

CertificateReport certify_fitting_trace(const AlgorithmFitting& fitting, const IterationTrace& trace,
                                        const TraceOptions& options) {
  const std::size_t start = fitting.trace_start;
  const bool shifted = start > 0 && trace.states.size() > start + 1;
  const IterationTrace checked = shifted ? drop_prefix(trace, start) : trace;
  CertificateReport report = certify_trace(checked, fitting.engine(), fitting.x_star, options);
  if (fitting.extra_checks) report.merge(fitting.extra_checks(checked));
  if (shifted) report.notes.push_back("trace checks start at k = " + std::to_string(start));
  return report;
}

namespace zoo_detail {

double param(const ParamMap& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) fail(ErrorCode::MissingParam, "missing parameter '" + key + "'");
  return it->second;
}

double spectral_norm_sq(const Matrix& A) { return psd_lipschitz(A.transpose() * A); }

double generalized_min_eig(const Matrix& H, const Matrix& S) {
  const Matrix Hs = 0.5 * (H + H.transpose());
  const Matrix Ss = 0.5 * (S + S.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(Hs, Ss);
  if (es.info() != Eigen::Success) fail(ErrorCode::NotPSD, "S is not positive definite");
  return es.eigenvalues().minCoeff();
}

}  // namespace zoo_detail

}  // namespace gfbs
