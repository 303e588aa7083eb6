#include "interp_solve/problems.hpp"

#include <algorithm>
#include <cmath>

namespace interp_solve {
namespace {

// Pairs closer than this (in the relevant denominator) carry no information.
constexpr double kDegeneratePair = 1e-12;

// Exact spectral norm of a 2x2 matrix [[a, b], [c, d]].
double spectral_norm_2x2(double a, double b, double c, double d) {
  const double p = std::sqrt((a + d) * (a + d) + (b - c) * (b - c));
  const double q = std::sqrt((a - d) * (a - d) + (b + c) * (b + c));
  return 0.5 * (p + q);
}

struct Jac2 {
  double j11, j12, j21, j22;
};

// Deterministic maximization of ||J(x,y)||_2 over a 2-D box: dense grid, then
// a few shrinking refinement passes around the best cell. The fields below are
// low-degree polynomials, so this pins the constant to ~1e-8 relative.
template <typename JacFn>
double max_jacobian_norm(const Box& box, JacFn jac) {
  const int n = 321;
  double best = -1.0, bx = 0.0, by = 0.0;
  double lo_x = box.lower[0], hi_x = box.upper[0];
  double lo_y = box.lower[1], hi_y = box.upper[1];
  auto scan = [&](double ax, double bx_, double ay, double by_) {
    for (int i = 0; i < n; ++i) {
      const double x = ax + (bx_ - ax) * i / (n - 1);
      for (int j = 0; j < n; ++j) {
        const double y = ay + (by_ - ay) * j / (n - 1);
        const Jac2 J = jac(x, y);
        const double s = spectral_norm_2x2(J.j11, J.j12, J.j21, J.j22);
        if (s > best) {
          best = s;
          bx = x;
          by = y;
        }
      }
    }
  };
  scan(lo_x, hi_x, lo_y, hi_y);
  double wx = (hi_x - lo_x) / (n - 1), wy = (hi_y - lo_y) / (n - 1);
  for (int pass = 0; pass < 3; ++pass) {
    const double ax = std::max(lo_x, bx - wx), bx2 = std::min(hi_x, bx + wx);
    const double ay = std::max(lo_y, by - wy), by2 = std::min(hi_y, by + wy);
    scan(ax, bx2, ay, by2);
    wx = (bx2 - ax) / (n - 1);
    wy = (by2 - ay) / (n - 1);
  }
  return best;
}

}  // namespace

ProblemSpec quadratic_field(double a, double b) {
  if (a == 0.0 && b == 0.0) throw ParameterError("quadratic_field: (a, b) must not both be zero");
  const double L = std::sqrt(a * a + b * b);
  const double rho = b / (a * a + b * b);
  ProblemSpec p;
  p.name = "quadratic";
  p.field.dim = 2;
  p.field.eval_fn = [a, b](const Point& z) {
    return Point{b * z[0] + a * z[1], -a * z[0] + b * z[1]};
  };
  p.field.lipschitz = L;
  p.field.comonotonicity = rho;
  p.resolvent = ResolventMap::identity();
  p.known_zero = Point{0.0, 0.0};
  p.linear_matrix = std::vector<double>{b, a, -a, b};
  p.constants = {{"a", a}, {"b", b}, {"L", L}, {"rho", rho}};
  return p;
}

ProblemSpec quadratic_from_constants(double L, double rho) {
  if (L <= 0.0) throw ParameterError("quadratic_from_constants: L must be positive");
  if (std::fabs(rho) > 1.0 / L) {
    throw ParameterError("quadratic_from_constants: need |rho| <= 1/L");
  }
  const double a = std::sqrt(L * L - L * L * L * L * rho * rho);
  const double b = L * L * rho;
  ProblemSpec p = quadratic_field(a, b);
  // Pin the metadata to the requested constants exactly (the roundtrip
  // through (a, b) is accurate to rounding, but these are the ground truth).
  p.field.lipschitz = L;
  p.field.comonotonicity = rho;
  p.constants["L"] = L;
  p.constants["rho"] = rho;
  return p;
}

ProblemSpec polar_game_field(double a) {
  if (a <= 0.0) throw ParameterError("polar_game_field: a must be positive");
  const double c = a / 16.0;
  auto psi = [c](double x, double y) {
    const double s = x * x + y * y;
    return c * x * (s - 1.0) * (16.0 * s - 9.0);
  };
  ProblemSpec p;
  p.name = "polar";
  p.field.dim = 2;
  p.field.eval_fn = [psi](const Point& z) {
    return Point{psi(z[0], z[1]) - z[1], psi(z[1], z[0]) + z[0]};
  };
  Box box = Box::centered(2, 1.1);
  p.resolvent = ResolventMap::box_projection(box);
  p.known_zero = Point{0.0, 0.0};

  // d/dx [x (s-1)(16s-9)] = (s-1)(16s-9) + 2x^2 (16s-9) + 32x^2 (s-1), etc.
  auto jac = [c](double x, double y) {
    const double s = x * x + y * y;
    const double g = 16.0 * s - 9.0;
    const double h = s - 1.0;
    Jac2 J;
    J.j11 = c * (h * g + 2.0 * x * x * g + 32.0 * x * x * h);
    J.j12 = c * (2.0 * x * y * g + 32.0 * x * y * h) - 1.0;
    J.j21 = c * (2.0 * x * y * g + 32.0 * x * y * h) + 1.0;
    J.j22 = c * (h * g + 2.0 * y * y * g + 32.0 * y * y * h);
    return J;
  };
  const double L = max_jacobian_norm(box, jac);
  p.field.lipschitz = L;
  // Only an interval is known for rho; store the conservative (most negative)
  // endpoint so every rho-dependent bound check stays valid.
  p.field.comonotonicity = -1.0 / (8.0 * L);
  p.annotation = "rho lies in (-1/(8L), -1/(10L)); the stored value is the -1/(8L) endpoint";
  p.constants = {{"a", a}, {"L", L}, {"rho", -1.0 / (8.0 * L)}};
  return p;
}

ProblemSpec forsaken_field(double a) {
  auto dpsi = [](double t) { return 0.5 * t - 2.0 * t * t * t + t * t * t * t * t; };
  auto ddpsi = [](double t) { return 0.5 - 6.0 * t * t + 5.0 * t * t * t * t; };
  ProblemSpec p;
  p.name = "forsaken";
  p.field.dim = 2;
  p.field.eval_fn = [a, dpsi](const Point& z) {
    return Point{z[1] - a + dpsi(z[0]), -z[0] + dpsi(z[1])};
  };
  Box box = Box::centered(2, 1.5);
  p.resolvent = ResolventMap::box_projection(box);

  auto jac = [ddpsi](double x, double y) { return Jac2{ddpsi(x), 1.0, -1.0, ddpsi(y)}; };
  p.field.lipschitz = max_jacobian_norm(box, jac);

  // The interior stationary point, by Newton from a point in its basin.
  Point z{0.1, 0.4};
  for (int it = 0; it < 100; ++it) {
    const Point f = p.field.eval(z);
    if (std::hypot(f[0], f[1]) <= 1e-14) break;
    const Jac2 J = jac(z[0], z[1]);
    const Point step = solve_dense({J.j11, J.j12, J.j21, J.j22}, f);
    z[0] -= step[0];
    z[1] -= step[1];
  }
  const Point fz = p.field.eval(z);
  if (std::hypot(fz[0], fz[1]) <= 1e-10 && box.contains(z)) {
    p.known_zero = z;
  } else {
    p.annotation = "no interior zero located for this a";
  }
  p.constants = {{"a", a}, {"L", *p.field.lipschitz}};
  return p;
}

ProblemSpec linear_field(std::vector<double> M, std::size_t dim, std::optional<Box> box) {
  if (M.size() != dim * dim) throw DimensionError("linear_field: matrix size != dim^2");
  if (box && box->dim() != dim) throw DimensionError("linear_field: box dimension mismatch");
  ProblemSpec p;
  p.name = "linear";
  p.field.dim = dim;
  p.field.eval_fn = [M, dim](const Point& z) {
    Point r(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < dim; ++j) s += M[i * dim + j] * z[j];
      r[i] = s;
    }
    return r;
  };
  // Spectral norm by power iteration on M^T M (deterministic start).
  {
    Point v(dim, 1.0);
    for (int it = 0; it < 500; ++it) {
      Point Mv(dim, 0.0), MtMv(dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) Mv[i] += M[i * dim + j] * v[j];
      }
      for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < dim; ++i) MtMv[j] += M[i * dim + j] * Mv[i];
      }
      const double n = norm(MtMv);
      if (n == 0.0) break;
      v = scaled(MtMv, 1.0 / n);
    }
    // One clean Rayleigh quotient at the end.
    Point Mv(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) Mv[i] += M[i * dim + j] * v[j];
    }
    const double nv = norm(v);
    if (nv > 0.0) p.field.lipschitz = norm(Mv) / nv;
  }
  if (box) {
    p.resolvent = ResolventMap::box_projection(*box);
  } else {
    p.resolvent = ResolventMap::identity();
  }
  p.known_zero = Point(dim, 0.0);
  p.linear_matrix = std::move(M);
  return p;
}

Point exact_resolvent(const ProblemSpec& p, double gamma, const Point& z) {
  if (gamma <= 0.0) throw ParameterError("exact_resolvent: gamma must be positive");
  if (!p.linear() || p.constrained()) {
    throw UnsupportedError("exact_resolvent: needs an unconstrained linear field");
  }
  const std::size_t d = p.dim();
  if (z.size() != d) throw DimensionError("exact_resolvent: point dimension mismatch");
  std::vector<double> A(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      A[i * d + j] = gamma * (*p.linear_matrix)[i * d + j] + (i == j ? 1.0 : 0.0);
    }
  }
  return solve_dense(std::move(A), z);
}

namespace {

Point sample_in(const Box& box, std::uint64_t seed, std::uint64_t i, std::uint64_t slot) {
  Rng rng = Rng::substream(seed, i, slot);
  return box.sample(rng);
}

}  // namespace

double estimate_lipschitz(const VectorField& field, const Box& box, std::size_t samples,
                          std::uint64_t seed) {
  if (samples == 0) throw ParameterError("estimate_lipschitz: samples must be >= 1");
  double best = -1.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point z = sample_in(box, seed, i, 0);
    const Point zp = sample_in(box, seed, i, 1);
    const double dz = dist(z, zp);
    if (dz <= kDegeneratePair) continue;
    best = std::max(best, dist(field.eval(z), field.eval(zp)) / dz);
  }
  if (best < 0.0) throw EstimationError("estimate_lipschitz: all sampled pairs degenerate");
  return best;
}

double estimate_comonotonicity(const VectorField& field, const Box& box, std::size_t samples,
                               std::uint64_t seed, const std::optional<Point>& reference_zero) {
  if (samples == 0) throw ParameterError("estimate_comonotonicity: samples must be >= 1");
  bool any = false;
  double worst = 0.0;
  auto consider = [&](const Point& z, const Point& zp) {
    const Point dv = sub(field.eval(z), field.eval(zp));
    const double nv = norm(dv);
    if (nv <= kDegeneratePair) return;
    const double r = dot(dv, sub(z, zp)) / (nv * nv);
    worst = any ? std::min(worst, r) : r;
    any = true;
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const Point z = sample_in(box, seed, i, 0);
    consider(z, sample_in(box, seed, i, 1));
    if (reference_zero) consider(z, *reference_zero);
  }
  if (!any) throw EstimationError("estimate_comonotonicity: all sampled pairs degenerate");
  return worst;
}

double estimate_star_rho(const VectorField& field, const Box& box, const Point& z_star,
                         std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw ParameterError("estimate_star_rho: samples must be >= 1");
  bool any = false;
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point z = sample_in(box, seed, i, 0);
    const Point fz = field.eval(z);
    const double nf = norm(fz);
    if (nf <= kDegeneratePair) continue;
    const double r = dot(fz, sub(z, z_star)) / (nf * nf);
    worst = any ? std::min(worst, r) : r;
    any = true;
  }
  if (!any) throw EstimationError("estimate_star_rho: all sampled points degenerate");
  return worst;
}

double estimate_lipschitz(const ProblemSpec& p, std::size_t samples, std::uint64_t seed) {
  return estimate_lipschitz(p.field, p.sampling_box(), samples, seed);
}

double estimate_comonotonicity(const ProblemSpec& p, std::size_t samples, std::uint64_t seed) {
  return estimate_comonotonicity(p.field, p.sampling_box(), samples, seed, p.known_zero);
}

double estimate_star_rho(const ProblemSpec& p, std::size_t samples, std::uint64_t seed) {
  if (!p.known_zero) throw EstimationError("estimate_star_rho: problem has no known zero");
  return estimate_star_rho(p.field, p.sampling_box(), *p.known_zero, samples, seed);
}

}  // namespace interp_solve
