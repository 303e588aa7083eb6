#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "interp_solve/core.hpp"

namespace interp_solve {

// A concrete instance of the inclusion 0 in Az + Fz: the field F (with
// metadata), the resolvent of A, and whatever ground truth is known about it.
struct ProblemSpec {
  std::string name;
  VectorField field;
  ResolventMap resolvent;
  std::optional<Point> known_zero;
  // Row-major d*d matrix M when F(z) = M z; enables closed-form resolvents.
  std::optional<std::vector<double>> linear_matrix;
  // Free-form notes (e.g. an interval for rho that is known but not pinned).
  std::string annotation;
  // Constants echoed into run reports.
  std::map<std::string, double> constants;

  std::size_t dim() const { return field.dim; }
  bool constrained() const { return resolvent.kind == ResolventMap::Kind::BoxProjection; }
  bool linear() const { return linear_matrix.has_value(); }

  // Where estimators and property checks sample: the constraint box if there
  // is one, otherwise [-2, 2]^d.
  Box sampling_box() const {
    if (constrained()) return *resolvent.box;
    return Box::centered(dim(), 2.0);
  }
};

// F(x, y) = (b*x + a*y, -a*x + b*y): the gradient field of the saddle
// b/2*||x||^2 + a*x*y - b/2*||y||^2. L = sqrt(a^2 + b^2), rho = b / (a^2 + b^2).
// (a, b) = (1, 0) is the plain bilinear game. Unconstrained; zero at origin.
ProblemSpec quadratic_field(double a, double b);

// Inverse parametrization: builds the quadratic field with exactly the given
// Lipschitz constant L > 0 and comonotonicity rho (|rho| <= 1/L required):
// a = sqrt(L^2 - L^4 rho^2), b = L^2 rho.
ProblemSpec quadratic_from_constants(double L, double rho);

// Polar game on the box ||z||_inf <= 1.1:
//   F(x, y) = (psi(x, y) - y, psi(y, x) + x),
//   psi(x, y) = a/16 * x * (-1 + x^2 + y^2) * (-9 + 16 x^2 + 16 y^2).
// Unique zero at the origin; an attracting cycle near ||z|| = 1 traps plain
// gradient-style dynamics started outside ||z|| = 3/4.
ProblemSpec polar_game_field(double a = 1.0 / 3.0);

// Forsaken game on the box ||z||_inf <= 1.5:
//   F(x, y) = (y - a + psi'(x), -x + psi'(y)), psi'(t) = t/2 - 2 t^3 + t^5.
// a = 0.45 is the classic instance, a = 0.34 the low-noise edition. The
// interior zero is located at construction by Newton's method.
ProblemSpec forsaken_field(double a);

// Generic linear field F(z) = M z (row-major M), mostly for tests in d > 2.
ProblemSpec linear_field(std::vector<double> M, std::size_t dim,
                         std::optional<Box> box = std::nullopt);

// Closed-form resolvent J_{gamma S}(z) = (I + gamma M)^{-1} z of an
// unconstrained linear problem; UnsupportedError for anything else.
Point exact_resolvent(const ProblemSpec& p, double gamma, const Point& z);

// Empirical constants over the problem's sampling box. Each index i draws an
// independent pair (z_i, z_i') from sub-streams (seed, i, 0/1), so sample sets
// are nested across growing `samples` and estimates are reproducible.

// max over pairs of ||Fz - Fz'|| / ||z - z'|| (lower bound on the true L;
// nondecreasing in `samples` for a fixed seed).
double estimate_lipschitz(const VectorField& field, const Box& box, std::size_t samples,
                          std::uint64_t seed);

// min over pairs of <Fz - Fz', z - z'> / ||Fz - Fz'||^2 (upper bound on the
// true rho). Pairs with ||Fz - Fz'|| below the degeneracy threshold are
// skipped. When a reference zero is supplied, the pairs (z_i, z*) are included
// as well, which makes the star-variant estimate below a sub-family of this
// one (so estimate_star_rho >= estimate_comonotonicity by construction).
double estimate_comonotonicity(const VectorField& field, const Box& box, std::size_t samples,
                               std::uint64_t seed,
                               const std::optional<Point>& reference_zero = std::nullopt);

// min over points of <Fz, z - z*> / ||Fz||^2 for the known zero z* — the
// constant of the star (weak-MVI) variant of comonotonicity.
double estimate_star_rho(const VectorField& field, const Box& box, const Point& z_star,
                         std::size_t samples, std::uint64_t seed);

// ProblemSpec conveniences (sampling box / metadata taken from the spec).
double estimate_lipschitz(const ProblemSpec& p, std::size_t samples, std::uint64_t seed);
double estimate_comonotonicity(const ProblemSpec& p, std::size_t samples, std::uint64_t seed);
double estimate_star_rho(const ProblemSpec& p, std::size_t samples, std::uint64_t seed);

}  // namespace interp_solve
