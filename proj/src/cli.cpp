#include "gfbs/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "gfbs/certify.hpp"
#include "gfbs/matrix_io.hpp"

namespace gfbs {

namespace {

constexpr double kCompareTol = 1e-8;

struct Prepared {
  ProblemInstance problem;
  AlgorithmFitting fitting;
};

Prepared prepare(const RunConfig& config, std::ostream& err, bool with_oracle = true) {
  Prepared p;
  p.problem = make_problem(config);
  ParamMap params = default_params(config.algo, p.problem);
  for (const auto& [key, value] : config.params) params[key] = value;
  if (config.params.count("tau_beta") && !config.params.count("tau")) params.erase("tau");
  BuildOptions opts;
  opts.with_oracle = with_oracle;
  p.fitting = build(config.algo, p.problem, params, opts);
  for (const auto& v : p.fitting.admissible.violations()) err << "warning: " << v << '\n';
  return p;
}

std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) fail(ErrorCode::ConfigError, "cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

std::string describe(const RunConfig& c, const AlgorithmFitting& f) {
  return std::string("algo=") + algorithm_name(c.algo) + " problem=" + problem_kind_name(f.problem.kind) +
         " seed=" + std::to_string(c.seed);
}

void admissibility_notes(const AlgorithmFitting& f, CertificateReport& report) {
  for (const auto& r : f.admissible.ranges) {
    report.notes.push_back("admissible " + r.name + " = " + format_real(r.value) + " in (" + format_real(r.lo) +
                           ", " + format_real(r.hi) + ") [" + r.condition + "] " +
                           (r.violated() ? "VIOLATED" : "ok"));
  }
  for (const auto& n : f.admissible.notes) report.notes.push_back(n);
  if (!f.index_shift.empty()) report.notes.push_back("index shift: " + f.index_shift);
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_status_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace

int exit_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SolverFailure:
      return kExitSolver;
    case ErrorCode::OracleNotConverged:
    case ErrorCode::MissingOracle:
      return kExitOracle;
    default:
      return kExitConfig;
  }
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Prepared p = prepare(config, err);
    const AlgorithmFitting& fit = p.fitting;
    const Vector x0 = initial_point(fit, config.seed);
    const auto t0 = std::chrono::steady_clock::now();
    const IterationTrace trace = run(fit.engine(), x0, config.iters, config.tol, run_options(fit));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto dir = ensure_dir(config.out_dir);
    std::ofstream csv(dir / "trace.csv");
    write_trace_csv(csv, trace);
    if (!csv) fail(ErrorCode::ConfigError, "cannot write trace file in '" + config.out_dir + "'");

    std::ostringstream line;
    const double final_res = trace.q_residuals.empty() ? 0.0 : trace.q_residuals.back();
    char wall_text[32];
    std::snprintf(wall_text, sizeof wall_text, "%.3f", wall);
    line << describe(config, fit) << " iterations=" << trace.iterations() << " final_residual=" << format_real(final_res)
         << " residual_norm=" << trace.residual_norm << " converged=" << (trace.converged ? "yes" : "no");
    if (!trace.kkt_residuals.empty()) line << " kkt=" << format_real(trace.kkt_residuals.back());
    line << " admissible=" << (fit.admissible.ok() ? "yes" : "no") << " wall_time=" << wall_text << "s";
    if (trace.diverged) line << " diverged=yes";
    if (trace.selection_made) line << " selection=least_norm";
    out << line.str() << '\n';
    std::ofstream(dir / "summary.txt") << line.str() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Prepared p = prepare(config, err);
    const AlgorithmFitting& fit = p.fitting;
    CertificateReport report = certify_static(fit.engine());
    const IterationTrace trace = run(fit.engine(), initial_point(fit, config.seed), config.iters, config.tol,
                                     run_options(fit));
    TraceOptions topts;
    if (config.check_tol) topts.tol = *config.check_tol;
    report.merge(certify_fitting_trace(fit, trace, topts));
    admissibility_notes(fit, report);
    if (trace.diverged) report.notes.push_back("iterates became non-finite");

    bool verdict = report.passed();
    if (!config.checks.empty()) {
      verdict = true;
      for (const auto& name : config.checks) {
        const Check* c = report.find(name);
        if (!c) {
          report.notes.push_back("requested check '" + name + "' was not produced");
          verdict = false;
        } else if (!c->passed && !c->informational) {
          verdict = false;
        }
      }
    }
    report.notes.push_back(std::string("verdict ") + (verdict ? "PASS" : "FAIL"));

    const auto dir = ensure_dir(config.out_dir);
    std::ofstream file(dir / "report.txt");
    write_report(file, report);
    out << "# " << describe(config, fit) << '\n';
    write_report(out, report);
    return static_cast<int>(verdict ? kExitOk : kExitCheckFailed);
  });
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Prepared p = prepare(config, err, false);
    const AlgorithmFitting& fit = p.fitting;
    const double dev = equivalence_report(fit, initial_point(fit, config.seed), config.iters);
    out << describe(config, fit) << " iterations=" << config.iters << " max_deviation=" << format_real(dev)
        << (dev <= kCompareTol ? " PASS" : " FAIL");
    if (!fit.index_shift.empty()) out << " index_shift=\"" << fit.index_shift << '"';
    out << '\n';
    return static_cast<int>(dev <= kCompareTol ? kExitOk : kExitCheckFailed);
  });
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"G-FBS splitting engine: run, certify and compare algorithm fittings"};
  app.require_subcommand(1, 1);
  std::vector<std::string> configs;
  std::vector<std::uint64_t> seeds;
  std::optional<int> iters;
  std::optional<double> tol;
  std::optional<std::string> out_dir;
  int jobs = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", configs, "Configuration file (repeatable)")->required();
    sub->add_option("--seed", seeds, "Problem / initial-point seed (repeatable)");
    sub->add_option("--iters", iters, "Iteration count")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "Stopping tolerance on the Q/S residual")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--jobs", jobs, "Concurrent workers")->check(CLI::PositiveNumber);
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Run a fitting and write trace.csv");
  CLI::App* cert_cmd = app.add_subcommand("certify", "Static and per-iteration certificates, report.txt");
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Engine versus native iterates");
  for (CLI::App* sub : {run_cmd, cert_cmd, cmp_cmd}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  struct Job {
    RunConfig config;
  };
  std::vector<Job> job_list;
  try {
    for (const auto& path : configs) {
      RunConfig base = load_config(path);
      if (iters) base.iters = *iters;
      if (tol) base.tol = *tol;
      if (out_dir) base.out_dir = *out_dir;
      if (seeds.empty()) {
        job_list.push_back({base});
      } else {
        for (auto s : seeds) {
          RunConfig c = base;
          c.seed = s;
          job_list.push_back({c});
        }
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_status_for(e.code());
  }
  if (job_list.size() > 1) {
    for (auto& j : job_list) {
      const std::string stem = std::filesystem::path(j.config.source).stem().string();
      j.config.out_dir = (std::filesystem::path(j.config.out_dir) / (stem + "_seed" + std::to_string(j.config.seed))).string();
    }
  }

  auto command = run_cmd->parsed() ? cmd_run : cert_cmd->parsed() ? cmd_certify : cmd_compare;
  std::vector<std::string> outs(job_list.size()), errs(job_list.size());
  std::vector<int> codes(job_list.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < job_list.size(); i = next++) {
      std::ostringstream o, e;
      codes[i] = command(job_list[i].config, o, e);
      outs[i] = o.str();
      errs[i] = e.str();
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), job_list.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int status = kExitOk;
  for (std::size_t i = 0; i < job_list.size(); ++i) {
    out << outs[i];
    err << errs[i];
    status = std::max(status, codes[i]);
  }
  return status;
}

}  // namespace gfbs
