#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gfbs/problem.hpp"
#include "gfbs/zoo.hpp"

namespace gfbs {

// Flat key = value text with sections:
//
//   iters = 1000            # run settings before any section (or under [run])
//   tol = 1e-12
//   out = results
//   [algo]
//   name = ProximalFBS
//   gamma = 1.5             # every other key is a real-valued parameter
//   [problem]
//   kind = Lasso
//   seed = 7
//   n = 20
//   p = 50
//   lambda = 0.3            # optional override
//   file = instance.txt     # optional: load a serialized instance instead
//   [checks]
//   fejer = on              # requested checks gate the certify verdict
//   tol = 1e-8              # trace-check tolerance
//
// '#' and ';' start comments.
struct RunConfig {
  AlgorithmName algo = AlgorithmName::ProximalFBS;
  ProblemKind kind = ProblemKind::Lasso;
  bool kind_set = false;
  std::uint64_t seed = 0;
  ProblemDims dims;
  bool dims_set = false;
  std::optional<double> lambda;
  std::string instance_file;
  ParamMap params;
  int iters = 1000;
  double tol = 1e-12;
  std::string out_dir = "gfbs_out";
  std::vector<std::string> checks;
  std::optional<double> check_tol;
  std::string source = "<config>";
};

// Errors carry ErrorCode::ConfigError and a "source:line:col: message" text.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

// The problem instance a configuration describes.
ProblemInstance make_problem(const RunConfig& config);

}  // namespace gfbs
