#include "gfbs/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "gfbs/errors.hpp"

namespace gfbs {

namespace {

struct Located {
  std::string text;
  std::size_t col = 1;  // 1-based column of the first character
};

Located trim(const std::string& s, std::size_t offset) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {"", offset + 1};
  const auto last = s.find_last_not_of(" \t\r");
  return {s.substr(first, last - first + 1), offset + first + 1};
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void error(std::size_t line, std::size_t col, const std::string& msg) const {
    fail(ErrorCode::ConfigError, source_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }

  double real(const Located& v, std::size_t line) const {
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(v.text.c_str(), &end);
    if (v.text.empty() || *end != '\0' || errno == ERANGE) error(line, v.col, "expected a real number, got '" + v.text + "'");
    return x;
  }

  long long integer(const Located& v, std::size_t line, long long lo) const {
    char* end = nullptr;
    errno = 0;
    const long long x = std::strtoll(v.text.c_str(), &end, 10);
    if (v.text.empty() || *end != '\0' || errno == ERANGE || x < lo)
      error(line, v.col, "expected an integer >= " + std::to_string(lo) + ", got '" + v.text + "'");
    return x;
  }

  std::uint64_t unsigned64(const Located& v, std::size_t line) const {
    char* end = nullptr;
    errno = 0;
    if (v.text.empty() || v.text[0] == '-') error(line, v.col, "expected an unsigned integer, got '" + v.text + "'");
    const unsigned long long x = std::strtoull(v.text.c_str(), &end, 10);
    if (*end != '\0' || errno == ERANGE) error(line, v.col, "expected an unsigned integer, got '" + v.text + "'");
    return x;
  }

  static bool truthy(const std::string& s, bool& out) {
    if (s == "on" || s == "true" || s == "yes" || s == "1") return out = true, true;
    if (s == "off" || s == "false" || s == "no" || s == "0") return out = false, true;
    return false;
  }

  RunConfig parse(std::istream& in) {
    RunConfig cfg;
    cfg.source = source_;
    std::string section = "run";
    bool have_algo = false;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto cut = raw.find_first_of("#;");
      const std::string body = cut == std::string::npos ? raw : raw.substr(0, cut);
      const Located whole = trim(body, 0);
      if (whole.text.empty()) continue;
      if (whole.text.front() == '[') {
        if (whole.text.back() != ']') error(line, whole.col, "unterminated section header");
        section = trim(whole.text.substr(1, whole.text.size() - 2), 0).text;
        if (section != "algo" && section != "problem" && section != "checks" && section != "run")
          error(line, whole.col + 1, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) error(line, whole.col, "expected key = value");
      const Located key = trim(body.substr(0, eq), 0);
      const Located val = trim(body.substr(eq + 1), eq + 1);
      if (key.text.empty()) error(line, whole.col, "empty key");
      if (val.text.empty()) error(line, val.col, "empty value for '" + key.text + "'");

      if (section == "run") {
        if (key.text == "iters") {
          cfg.iters = static_cast<int>(integer(val, line, 1));
        } else if (key.text == "tol") {
          cfg.tol = real(val, line);
        } else if (key.text == "out") {
          cfg.out_dir = val.text;
        } else {
          error(line, key.col, "unknown run setting '" + key.text + "'");
        }
      } else if (section == "algo") {
        if (key.text == "name") {
          try {
            cfg.algo = parse_algorithm_name(val.text);
          } catch (const Error&) {
            error(line, val.col, "unknown algorithm '" + val.text + "'");
          }
          have_algo = true;
        } else {
          cfg.params[key.text] = real(val, line);
        }
      } else if (section == "problem") {
        if (key.text == "kind") {
          try {
            cfg.kind = parse_problem_kind(val.text);
          } catch (const Error&) {
            error(line, val.col, "unknown problem kind '" + val.text + "'");
          }
          cfg.kind_set = true;
        } else if (key.text == "seed") {
          cfg.seed = unsigned64(val, line);
        } else if (key.text == "n" || key.text == "m" || key.text == "p") {
          const Index v = static_cast<Index>(integer(val, line, 0));
          (key.text == "n" ? cfg.dims.n : key.text == "m" ? cfg.dims.m : cfg.dims.p) = v;
          cfg.dims_set = true;
        } else if (key.text == "lambda") {
          cfg.lambda = real(val, line);
        } else if (key.text == "file") {
          cfg.instance_file = val.text;
        } else {
          error(line, key.col, "unknown problem setting '" + key.text + "'");
        }
      } else {  // checks
        if (key.text == "tol") {
          cfg.check_tol = real(val, line);
        } else if (key.text == "names") {
          std::stringstream ss(val.text);
          std::string item;
          while (std::getline(ss, item, ',')) {
            const std::string name = trim(item, 0).text;
            if (!name.empty()) cfg.checks.push_back(name);
          }
        } else {
          bool on = false;
          if (!truthy(val.text, on)) error(line, val.col, "expected on/off for check '" + key.text + "'");
          if (on) cfg.checks.push_back(key.text);
        }
      }
    }
    if (!have_algo) error(line + 1, 1, "missing [algo] name");
    if (!cfg.kind_set) cfg.kind = default_problem(cfg.algo);
    return cfg;
  }

 private:
  std::string source_;
};

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& source) { return Parser(source).parse(in); }

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, path + ":0:0: cannot open config file");
  RunConfig cfg = parse_config(in, path);
  // Instance files are resolved relative to the config file.
  if (!cfg.instance_file.empty()) {
    std::filesystem::path p(cfg.instance_file);
    if (p.is_relative()) cfg.instance_file = (std::filesystem::path(path).parent_path() / p).string();
  }
  return cfg;
}

ProblemInstance make_problem(const RunConfig& config) {
  ProblemInstance pb;
  if (!config.instance_file.empty()) {
    std::ifstream in(config.instance_file);
    if (!in) fail(ErrorCode::ConfigError, "cannot open instance file '" + config.instance_file + "'");
    pb = read_instance(in);
  } else {
    ProblemDims dims = default_dims(config.kind);
    if (config.dims_set) {
      if (config.dims.n) dims.n = config.dims.n;
      if (config.dims.m) dims.m = config.dims.m;
      if (config.dims.p) dims.p = config.dims.p;
    }
    pb = generate(config.kind, config.seed, dims);
    pb.seed = config.seed;
  }
  if (config.lambda) {
    if (!(*config.lambda > 0.0)) fail(ErrorCode::ConfigError, "lambda must be positive");
    if (pb.kind != ProblemKind::Lasso && pb.kind != ProblemKind::TV1D)
      fail(ErrorCode::ConfigError, "lambda applies to Lasso and TV1D problems only");
    pb.lambda = *config.lambda;
  }
  return pb;
}

}  // namespace gfbs
