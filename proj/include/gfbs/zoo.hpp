#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gfbs/certify.hpp"
#include "gfbs/engine.hpp"
#include "gfbs/problem.hpp"
#include "gfbs/report.hpp"

namespace gfbs {

enum class AlgorithmName {
  RelaxedADMM,
  ProximalADMM,
  GradientDescent,
  ClassicalPPA,
  ProximalFBS,
  ChambollePock,
  AriasCombettes,
  DykstraDual,
  PAPC,
  AFBA,
  CondatI,
  CondatII,
  ALM,
  LinearizedALM,
  LinearizedBregman
};

const char* algorithm_name(AlgorithmName name);
AlgorithmName parse_algorithm_name(const std::string& name);
const std::vector<AlgorithmName>& all_algorithms();

using ParamMap = std::map<std::string, double>;

// Independent implementation of an algorithm's own update equations. The state
// is initialised from an engine state and read back in engine coordinates, so
// that index re-timings (e.g. Chambolle-Pock's (s^k, u^{k-1})) stay internal.
class NativeIterator {
 public:
  virtual ~NativeIterator() = default;
  virtual void reset(const Vector& engine_x0) = 0;
  virtual void step() = 0;
  virtual Vector engine_view() const = 0;
};

// Open interval lo < value < hi for one parameter expression.
struct ParamRange {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  std::string condition;

  bool violated() const { return !(value > lo && value < hi); }
};

struct Admissibility {
  std::vector<ParamRange> ranges;
  std::vector<std::string> notes;

  bool ok() const;
  std::vector<std::string> violations() const;
};

struct AlgorithmFitting {
  AlgorithmName name = AlgorithmName::ProximalFBS;
  ProblemInstance problem;
  ParamMap params;
  std::shared_ptr<const SplittingModel> model;
  std::function<std::unique_ptr<NativeIterator>()> make_native;
  std::string index_shift;  // empty when engine and native states coincide
  Admissibility admissible;
  // Reference zero of A + B in engine coordinates (empty without an oracle).
  Vector x_star;
  // Problem KKT residual and, for equality-constrained templates, the
  // constraint violation, both evaluated at an engine state.
  std::function<double(const Vector&)> kkt;
  std::function<double(const Vector&)> feasibility;
  // Name of the dual block certified by the degenerate-metric rate ("s" or "p").
  std::string dual_block;
  // Fitting-specific trace checks (e.g. the relaxed-ADMM inner-product bound).
  std::function<CertificateReport(const IterationTrace&)> extra_checks;
  // First trace index at which the trajectory inequalities apply. Relaxed ADMM
  // needs B'p^k in dg(v^k), which its v-update guarantees only from k = 1 on.
  std::size_t trace_start = 0;

  const SplittingModel& engine() const { return *model; }
};

struct BuildOptions {
  bool with_oracle = true;
};

// Complete parameter set for a name/problem pair; user values override these.
ParamMap default_params(AlgorithmName name, const ProblemInstance& problem);
ProblemKind default_problem(AlgorithmName name);
bool supports_problem(AlgorithmName name, ProblemKind kind);

AlgorithmFitting build(AlgorithmName name, const ProblemInstance& problem, const ParamMap& params,
                       const BuildOptions& options = {});

// Seeded engine-coordinate starting point. A parameter "x0" fills every
// coordinate with that value instead.
Vector initial_point(const AlgorithmFitting& fitting, std::uint64_t seed);

// Max-abs deviation between engine iterates and native iterates over k steps.
double equivalence_report(const AlgorithmFitting& fitting, const Vector& x0, int k);

// Run options (reference, objective, KKT) wired from a fitting.
RunOptions run_options(const AlgorithmFitting& fitting);
// Per-iteration certificates plus the fitting's extra checks.
CertificateReport certify_fitting_trace(const AlgorithmFitting& fitting, const IterationTrace& trace,
                                        const TraceOptions& options = {});

namespace zoo_detail {

// Builders grouped by family; each assumes a complete ParamMap.
AlgorithmFitting build_admm(AlgorithmName name, const ProblemInstance& pb, const ParamMap& p);
AlgorithmFitting build_gradient(AlgorithmName name, const ProblemInstance& pb, const ParamMap& p);
AlgorithmFitting build_primal_dual(AlgorithmName name, const ProblemInstance& pb, const ParamMap& p);
AlgorithmFitting build_lagrangian(AlgorithmName name, const ProblemInstance& pb, const ParamMap& p);

double param(const ParamMap& p, const std::string& key);
double spectral_norm_sq(const Matrix& A);  // ||A^T A||
// Largest eta with H >= eta S for positive definite S (generalized eigenvalue).
double generalized_min_eig(const Matrix& H, const Matrix& S);

// Native iterator from three callbacks over an internal state vector.
class LambdaNative : public NativeIterator {
 public:
  using Map = std::function<Vector(const Vector&)>;
  LambdaNative(Map init, Map step, Map view) : init_(std::move(init)), step_(std::move(step)), view_(std::move(view)) {}
  void reset(const Vector& engine_x0) override { state_ = init_(engine_x0); }
  void step() override { state_ = step_(state_); }
  Vector engine_view() const override { return view_(state_); }

 private:
  Map init_, step_, view_;
  Vector state_;
};

}  // namespace zoo_detail

}  // namespace gfbs
