#pragma once

#include <gtest/gtest.h>

#include <functional>

#include "gfbs/errors.hpp"
#include "gfbs/rng.hpp"
#include "gfbs/types.hpp"

namespace gfbs::testing {

// Runs fn and asserts it throws gfbs::Error carrying `code`.
inline void expect_error(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << error_code_name(code) << " but nothing was thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

inline Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

// Random symmetric PSD matrix of the given rank.
inline Matrix random_psd(SplitMix64& rng, Index n, Index rank) {
  const Matrix G = rng.normal_matrix(n, rank);
  return G * G.transpose();
}

}  // namespace gfbs::testing
