// Python bindings: problem generation, runs, certificates, native comparison,
// prox evaluation and the command-line entry point.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gfbs/certify.hpp"
#include "gfbs/cli.hpp"
#include "gfbs/config.hpp"
#include "gfbs/errors.hpp"
#include "gfbs/metric.hpp"
#include "gfbs/prox.hpp"
#include "gfbs/zoo.hpp"

namespace py = pybind11;
using namespace gfbs;

namespace {

RunConfig make_config(const std::string& algo, const std::optional<std::string>& kind, std::uint64_t seed,
                      const std::optional<std::tuple<Index, Index, Index>>& dims, const ParamMap& params,
                      std::optional<double> lambda) {
  RunConfig c;
  c.algo = parse_algorithm_name(algo);
  c.kind = kind ? parse_problem_kind(*kind) : default_problem(c.algo);
  c.kind_set = true;
  c.seed = seed;
  if (dims) {
    c.dims = {std::get<0>(*dims), std::get<1>(*dims), std::get<2>(*dims)};
    c.dims_set = true;
  }
  c.params = params;
  c.lambda = lambda;
  return c;
}

AlgorithmFitting make_fitting(const RunConfig& c, bool with_oracle) {
  const ProblemInstance pb = make_problem(c);
  ParamMap p = default_params(c.algo, pb);
  for (const auto& [k, v] : c.params) p[k] = v;
  if (c.params.count("tau_beta") && !c.params.count("tau")) p.erase("tau");
  BuildOptions opts;
  opts.with_oracle = with_oracle;
  return build(c.algo, pb, p, opts);
}

py::dict check_dict(const Check& c) {
  py::dict d;
  d["name"] = c.name;
  d["passed"] = c.passed;
  d["worst_slack"] = c.worst_slack;
  d["location"] = c.location;
  d["informational"] = c.informational;
  d["value"] = c.value ? py::cast(*c.value) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_gfbs, m) {
  m.doc() = "Generalized forward-backward splitting engine";

  py::register_exception<Error>(m, "GfbsError", PyExc_RuntimeError);

  m.def("algorithms", [] {
    std::vector<std::string> names;
    for (AlgorithmName a : all_algorithms()) names.emplace_back(algorithm_name(a));
    return names;
  });

  m.def(
      "generate",
      [](const std::string& kind, std::uint64_t seed, std::optional<std::tuple<Index, Index, Index>> dims) {
        const ProblemKind k = parse_problem_kind(kind);
        ProblemDims d = default_dims(k);
        if (dims) d = {std::get<0>(*dims), std::get<1>(*dims), std::get<2>(*dims)};
        const ProblemInstance pb = generate(k, seed, d);
        py::dict out;
        out["kind"] = std::string(problem_kind_name(pb.kind));
        out["lambda"] = pb.lambda;
        for (const auto& [name, mat] : pb.data) out[py::str(name)] = mat;
        return out;
      },
      py::arg("kind"), py::arg("seed") = 0, py::arg("dims") = py::none(),
      "Seeded instance as a dict of matrices (vectors are single columns).");

  m.def(
      "run",
      [](const std::string& algo, std::optional<std::string> kind, std::uint64_t seed,
         std::optional<std::tuple<Index, Index, Index>> dims, ParamMap params, int iters, double tol,
         std::optional<double> lambda) {
        const RunConfig c = make_config(algo, kind, seed, dims, params, lambda);
        const AlgorithmFitting fit = make_fitting(c, true);
        const IterationTrace tr = run(fit.engine(), initial_point(fit, seed), iters, tol, run_options(fit));
        Matrix states(static_cast<Index>(tr.states.size()), fit.engine().dim());
        for (std::size_t k = 0; k < tr.states.size(); ++k) states.row(static_cast<Index>(k)) = tr.states[k].transpose();
        std::vector<std::string> blocks;
        for (Index i = 0; i < tr.layout.num_blocks(); ++i) blocks.push_back(tr.layout.name(i));
        py::dict out;
        out["states"] = states;
        out["blocks"] = blocks;
        out["q_residuals"] = tr.q_residuals;
        out["s_distances"] = tr.s_distances;
        out["objectives"] = tr.objectives;
        out["kkt_residuals"] = tr.kkt_residuals;
        out["residual_norm"] = tr.residual_norm;
        out["converged"] = tr.converged;
        out["diverged"] = tr.diverged;
        out["x_star"] = fit.x_star;
        out["admissible"] = fit.admissible.ok();
        out["params"] = fit.params;
        std::ostringstream csv;
        write_trace_csv(csv, tr);
        out["csv"] = csv.str();
        return out;
      },
      py::arg("algo"), py::arg("kind") = py::none(), py::arg("seed") = 0, py::arg("dims") = py::none(),
      py::arg("params") = ParamMap{}, py::arg("iters") = 1000, py::arg("tol") = 1e-12, py::arg("lambda_") = py::none());

  m.def(
      "certify",
      [](const std::string& algo, std::optional<std::string> kind, std::uint64_t seed,
         std::optional<std::tuple<Index, Index, Index>> dims, ParamMap params, int iters, double tol) {
        const RunConfig c = make_config(algo, kind, seed, dims, params, std::nullopt);
        const AlgorithmFitting fit = make_fitting(c, true);
        CertificateReport rep = certify_static(fit.engine());
        const IterationTrace tr = run(fit.engine(), initial_point(fit, seed), iters, tol, run_options(fit));
        rep.merge(certify_fitting_trace(fit, tr));
        py::list checks;
        for (const Check& ch : rep.checks) checks.append(check_dict(ch));
        py::dict out;
        out["checks"] = checks;
        out["notes"] = rep.notes;
        out["passed"] = rep.passed();
        return out;
      },
      py::arg("algo"), py::arg("kind") = py::none(), py::arg("seed") = 0, py::arg("dims") = py::none(),
      py::arg("params") = ParamMap{}, py::arg("iters") = 1000, py::arg("tol") = 1e-12);

  m.def(
      "compare",
      [](const std::string& algo, std::optional<std::string> kind, std::uint64_t seed,
         std::optional<std::tuple<Index, Index, Index>> dims, ParamMap params, int iters) {
        const RunConfig c = make_config(algo, kind, seed, dims, params, std::nullopt);
        const AlgorithmFitting fit = make_fitting(c, false);
        return equivalence_report(fit, initial_point(fit, seed), iters);
      },
      py::arg("algo"), py::arg("kind") = py::none(), py::arg("seed") = 0, py::arg("dims") = py::none(),
      py::arg("params") = ParamMap{}, py::arg("iters") = 1000,
      "Max-abs deviation between engine and native iterates.");

  m.def(
      "prox",
      [](const std::string& spec, double tau, const Vector& y) { return prox(ProxFunction::parse_spec(spec), tau, y); },
      py::arg("spec"), py::arg("tau"), py::arg("y"), "prox of tau f for a catalog spec such as 'l1 0.5'.");
  m.def(
      "prox_conjugate",
      [](const std::string& spec, double sigma, const Vector& y) {
        return prox_conjugate(ProxFunction::parse_spec(spec), sigma, y);
      },
      py::arg("spec"), py::arg("sigma"), py::arg("y"));

  m.def(
      "q_norm",
      [](const Matrix& Q, const Vector& x) { return build_metric(Q).norm(x); }, py::arg("Q"), py::arg("x"));

  m.def(
      "main",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "gfbs");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command line; returns (exit_code, stdout, stderr).");
}
