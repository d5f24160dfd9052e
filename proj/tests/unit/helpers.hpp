#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "marginopt/error.hpp"
#include "marginopt/polynomial.hpp"

namespace testutil {

using marginopt::Complex;

// Sorted by (real, imag) so multisets compare element-wise.
inline std::vector<Complex> sorted(std::vector<Complex> v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return v;
}

inline void expect_roots(const std::vector<Complex>& got, std::vector<Complex> want,
                         double tol) {
  ASSERT_EQ(got.size(), want.size());
  const auto a = sorted(got), b = sorted(std::move(want));
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, tol) << "root " << i;
  }
}

inline void expect_coeffs(const marginopt::Polynomial& p, const std::vector<double>& want,
                          double tol) {
  ASSERT_EQ(p.coeffs().size(), want.size());
  for (size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(p.coeffs()[i], want[i], tol) << i;
}

}  // namespace testutil

#define EXPECT_MARGINOPT_ERROR(stmt, ecode)                      \
  do {                                                           \
    try {                                                        \
      stmt;                                                      \
      ADD_FAILURE() << "no error thrown";                        \
    } catch (const marginopt::Error& e) {                        \
      EXPECT_EQ(e.code(), marginopt::ErrorCode::ecode) << e.what(); \
    }                                                            \
  } while (0)
