#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "interp_solve/errors.hpp"

namespace interp_solve {

// Iterates are plain dense vectors; problems here are tiny (d = 2 in all the
// built-ins), so no linear-algebra library is pulled in.
using Point = std::vector<double>;

inline void check_same_dim(const Point& a, const Point& b, const char* where) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(where) + ": dimension mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

inline Point add(const Point& a, const Point& b) {
  check_same_dim(a, b, "add");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Point sub(const Point& a, const Point& b) {
  check_same_dim(a, b, "sub");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Point scaled(const Point& a, double s) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// a + s*b, the workhorse of every step rule.
inline Point axpy(const Point& a, double s, const Point& b) {
  check_same_dim(a, b, "axpy");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
  return r;
}

// (1-lambda)*a + lambda*b. All relaxation/interpolation updates use exactly
// this expression so that algebraically identical methods agree bitwise.
inline Point interpolate(const Point& a, const Point& b, double lambda) {
  check_same_dim(a, b, "interpolate");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = (1.0 - lambda) * a[i] + lambda * b[i];
  return r;
}

inline double dot(const Point& a, const Point& b) {
  check_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }

inline double dist(const Point& a, const Point& b) { return norm(sub(a, b)); }

inline bool all_finite(const Point& a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Solves A*x = b for small dense A (row-major d*d) by Gaussian elimination
// with partial pivoting. Used for closed-form resolvents of linear fields.
inline Point solve_dense(std::vector<double> A, Point b) {
  const std::size_t d = b.size();
  if (A.size() != d * d) throw DimensionError("solve_dense: matrix/vector size mismatch");
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(A[r * d + col]) > std::fabs(A[piv * d + col])) piv = r;
    }
    if (A[piv * d + col] == 0.0) throw ParameterError("solve_dense: singular matrix");
    if (piv != col) {
      for (std::size_t c = 0; c < d; ++c) std::swap(A[piv * d + c], A[col * d + c]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < d; ++r) {
      const double f = A[r * d + col] / A[col * d + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < d; ++c) A[r * d + c] -= f * A[col * d + c];
      b[r] -= f * b[col];
    }
  }
  Point x(d, 0.0);
  for (std::size_t ri = d; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < d; ++c) s -= A[ri * d + c] * x[c];
    x[ri] = s / A[ri * d + ri];
  }
  return x;
}

}  // namespace interp_solve
