#pragma once

#include <iosfwd>
#include <string>

#include "gfbs/types.hpp"

namespace gfbs {

// Plain-text matrix format: a line "n m" followed by n rows of m reals.
Matrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const Matrix& m);

Matrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Matrix& m);

// Decimal text for a double with 17 significant digits (%.17g), which round-trips exactly.
std::string format_real(double x);

}  // namespace gfbs
