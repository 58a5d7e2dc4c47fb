#include "gfbs/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "gfbs/errors.hpp"

namespace gfbs {

Matrix read_matrix(std::istream& in) {
  long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) fail(ErrorCode::ConfigError, "bad matrix header");
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j)
      if (!(in >> m(i, j)))
        fail(ErrorCode::ConfigError, "matrix entry (" + std::to_string(i) + "," + std::to_string(j) + ") unreadable");
  return m;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open " + path);
  return read_matrix(in);
}

void save_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ConfigError, "cannot write " + path);
  write_matrix(out, m);
}

}  // namespace gfbs
