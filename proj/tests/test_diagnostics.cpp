// Tests for residual measures, the bound checkers, the H-cocoercivity
// property check, and the log-log slope fit. Checker arithmetic is verified
// against hand-computed values on small crafted trajectories.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "interp_solve/diagnostics.hpp"
#include "interp_solve/problems.hpp"
#include "interp_solve/solvers.hpp"

using namespace interp_solve;

namespace {

// A minimal trajectory carrying just what the checkers read.
Trajectory craft(std::vector<Point> iterates, double lambda,
                 std::optional<std::vector<double>> errors = std::nullopt) {
  Trajectory t;
  t.iterates = std::move(iterates);
  t.oracle_calls.assign(t.iterates.size(), 0);
  t.params.lambda = lambda;
  t.recorded_errors = std::move(errors);
  return t;
}

ResidualSeries series(std::vector<double> values) {
  ResidualSeries s;
  s.values = std::move(values);
  return s;
}

}  // namespace

TEST_CASE("residual kinds: frozen values on the bilinear game at z = (1,0)") {
  const ProblemSpec p = quadratic_field(1.0, 0.0);
  const Point z{1.0, 0.0};
  const double gamma = 0.5;

  // J_{0.5}(1,0) = (0.8, 0.4), so the exact residual is sqrt(0.04+0.16).
  CHECK(residual(p, z, gamma, ResidualKind::ExactResolvent) ==
        doctest::Approx(std::sqrt(0.2)).epsilon(1e-14));
  // ||F(1,0)|| = ||(0,-1)|| = 1.
  CHECK(residual(p, z, gamma, ResidualKind::OperatorNorm) == doctest::Approx(1.0).epsilon(1e-15));
  // Unconstrained step norm is gamma*||F z||.
  CHECK(residual(p, z, gamma, ResidualKind::StepNorm) == doctest::Approx(0.5).epsilon(1e-15));
  // The estimated resolvent converges to the exact one in the reference horizon.
  const double est = residual(p, z, gamma, ResidualKind::EstimatedResolvent, 32);
  CHECK(std::fabs(est - std::sqrt(0.2)) <= 1e-8);

  CHECK_THROWS_AS(residual(p, z, 0.0, ResidualKind::StepNorm), ParameterError);
}

TEST_CASE("residual kinds: unsupported combinations") {
  const ProblemSpec polar = polar_game_field();
  const Point z{0.5, 0.5};
  CHECK_THROWS_AS(residual(polar, z, 0.1, ResidualKind::ExactResolvent), UnsupportedError);
  CHECK_THROWS_AS(residual(polar, z, 0.1, ResidualKind::OperatorNorm), UnsupportedError);
  // Step norm and estimated resolvent work on constrained problems.
  CHECK(residual(polar, z, 0.1, ResidualKind::StepNorm) > 0.0);
  CHECK(residual(polar, z, 0.1, ResidualKind::EstimatedResolvent) > 0.0);
}

TEST_CASE("residual kind strings round-trip; defaults per problem shape") {
  for (ResidualKind k : {ResidualKind::ExactResolvent, ResidualKind::EstimatedResolvent,
                         ResidualKind::OperatorNorm, ResidualKind::StepNorm}) {
    CHECK(residual_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(residual_kind_from_string("bogus"), ParameterError);

  CHECK(default_residual_kind(quadratic_field(1.0, 0.0)) == ResidualKind::ExactResolvent);
  CHECK(default_residual_kind(polar_game_field()) == ResidualKind::StepNorm);
  VectorField f;
  f.dim = 2;
  f.eval_fn = [](const Point& z) { return Point{std::sin(z[0]), z[1]}; };
  ProblemSpec nonlinear;
  nonlinear.field = f;
  CHECK(default_residual_kind(nonlinear) == ResidualKind::OperatorNorm);
}

TEST_CASE("residual_series: alignment and the estimate flag") {
  const ProblemSpec p = quadratic_field(1.0, 0.0);
  SolverParams params;
  params.gamma = 0.5;
  params.lambda = 0.5;
  params.iterations = 5;
  const Trajectory traj = km_exact_run(p, params, {1.0, 0.0});
  const ResidualSeries exact = residual_series(p, traj, 0.5, ResidualKind::ExactResolvent);
  CHECK(exact.values.size() == traj.iterates.size());
  CHECK_FALSE(exact.estimate);
  CHECK(exact.gamma == 0.5);
  const ResidualSeries est = residual_series(p, traj, 0.5, ResidualKind::EstimatedResolvent);
  CHECK(est.estimate);
  for (std::size_t i = 0; i < est.values.size(); ++i) {
    CHECK(std::fabs(est.values[i] - exact.values[i]) <= 1e-8);
  }
}

TEST_CASE("km bound checker: frozen arithmetic without errors") {
  // z* = 0, iterates (1,0) -> (0.5,0) -> (0.25,0), residuals [1, 0.5, 0.25],
  // lambda = 1/2, no inexactness.
  const Trajectory traj = craft({{1.0, 0.0}, {0.5, 0.0}, {0.25, 0.0}}, 0.5);
  const BoundReport rep = check_km_bound(traj, series({1.0, 0.5, 0.25}), {0.0, 0.0});
  CHECK(rep.name == "km");
  CHECK(rep.applicable);
  CHECK(rep.initial_distance == 1.0);
  CHECK(rep.D_estimate == 1.0);
  REQUIRE(rep.parts.size() == 1);
  const BoundPart& part = rep.parts[0];
  CHECK(part.name == "averaged-residual");
  REQUIRE(part.lhs.size() == 2);
  // K=1: mean r^2 = 1, rhs = 1/(0.25*1) = 4. K=2: mean = 0.625, rhs = 2.
  CHECK(part.lhs[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(part.rhs[0] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(part.lhs[1] == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(part.rhs[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(part.all_satisfied);
  CHECK(rep.all_satisfied());
}

TEST_CASE("km bound checker: recorded errors enter the epsilon terms") {
  const Trajectory traj =
      craft({{1.0, 0.0}, {0.5, 0.0}, {0.25, 0.0}}, 0.5, std::vector<double>{0.1, 0.2});
  const BoundReport rep = check_km_bound(traj, series({1.0, 0.5, 0.25}), {0.0, 0.0});
  const BoundPart& part = rep.parts.at(0);
  // eps_0 = 2*0.5*0.1*1 + 0.25*0.01 = 0.1025 -> rhs(1) = 1.1025/0.25 = 4.41.
  // eps_1 = 2*0.5*0.2*0.5 + 0.25*0.04 = 0.11 -> rhs(2) = 1.2125/0.5 = 2.425.
  CHECK(part.rhs[0] == doctest::Approx(4.41).epsilon(1e-14));
  CHECK(part.rhs[1] == doctest::Approx(2.425).epsilon(1e-14));
}

TEST_CASE("km bound checker: violation bookkeeping") {
  // Residuals too large for the bound: rhs(1) = 4 < lhs(1) = 9.
  const Trajectory traj = craft({{1.0, 0.0}, {0.5, 0.0}}, 0.5);
  const BoundReport rep = check_km_bound(traj, series({3.0, 1.0}), {0.0, 0.0});
  const BoundPart& part = rep.parts.at(0);
  CHECK_FALSE(part.all_satisfied);
  CHECK(part.first_violation == 0);
  CHECK(part.max_violation == doctest::Approx(5.0).epsilon(1e-14));
  CHECK_FALSE(rep.all_satisfied());
}

TEST_CASE("km bound checker: applicability and input validation") {
  Trajectory bad = craft({{1.0, 0.0}, {0.5, 0.0}}, 1.0);  // lambda = 1
  BoundReport rep = check_km_bound(bad, series({1.0, 0.5}), {0.0, 0.0});
  CHECK_FALSE(rep.applicable);
  CHECK(rep.reason.find("lambda") != std::string::npos);
  CHECK(rep.parts.empty());

  Trajectory empty;
  CHECK_THROWS_AS(check_km_bound(empty, series({}), {0.0, 0.0}), DiagnosticsError);

  Trajectory ok = craft({{1.0, 0.0}, {0.5, 0.0}}, 0.5);
  CHECK_THROWS_AS(check_km_bound(ok, series({1.0}), {0.0, 0.0}), DiagnosticsError);
  CHECK_THROWS_AS(check_km_bound(ok, series({1.0, 0.5}), {0.0}), DimensionError);

  // A noisy run must carry an inexactness record.
  Trajectory noisy = craft({{1.0, 0.0}, {0.5, 0.0}}, 0.5);
  noisy.params.sigma0 = 0.1;
  CHECK_THROWS_AS(check_km_bound(noisy, series({1.0, 0.5}), {0.0, 0.0}), DiagnosticsError);
  noisy.recorded_errors = std::vector<double>{0.01};
  CHECK_NOTHROW(check_km_bound(noisy, series({1.0, 0.5}), {0.0, 0.0}));
}

TEST_CASE("last-iterate checker: frozen per-step and prefix arithmetic") {
  const Trajectory traj =
      craft({{1.0, 0.0}, {0.5, 0.0}, {0.25, 0.0}}, 0.5, std::vector<double>{0.1, 0.2});
  const BoundReport rep = check_last_iterate(traj, series({1.0, 0.5, 0.25}), {0.0, 0.0});
  CHECK(rep.name == "last");
  CHECK(rep.applicable);
  REQUIRE(rep.parts.size() == 2);

  // delta_0 = 4*0.1*(0.5 + 1) = 0.6, delta_1 = 4*0.2*(0.25 + 0.5) = 0.6.
  const BoundPart& step = rep.parts[0];
  CHECK(step.name == "per-step");
  REQUIRE(step.lhs.size() == 2);
  CHECK(step.lhs[0] == doctest::Approx(0.25).epsilon(1e-15));   // r_1^2
  CHECK(step.rhs[0] == doctest::Approx(1.6).epsilon(1e-14));    // r_0^2 + delta_0
  CHECK(step.lhs[1] == doctest::Approx(0.0625).epsilon(1e-15)); // r_2^2
  CHECK(step.rhs[1] == doctest::Approx(0.85).epsilon(1e-14));   // r_1^2 + delta_1
  CHECK(step.all_satisfied);

  // prefix rhs(K) = averaged rhs(K) + (1/K) sum_{j<K} (j+1) delta_j.
  const BoundPart& prefix = rep.parts[1];
  CHECK(prefix.name == "prefix");
  REQUIRE(prefix.lhs.size() == 2);
  CHECK(prefix.lhs[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(prefix.rhs[0] == doctest::Approx(4.41 + 0.6).epsilon(1e-14));
  CHECK(prefix.lhs[1] == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(prefix.rhs[1] == doctest::Approx(2.425 + 0.9).epsilon(1e-14));
  // Both prefixes exceed r_0^2 = 1: true but uninformative, flagged vacuous.
  REQUIRE(prefix.vacuous.size() == 2);
  CHECK(prefix.vacuous[0]);
  CHECK(prefix.vacuous[1]);
  CHECK(prefix.all_satisfied);
}

TEST_CASE("last-iterate checker: per-step violations are caught") {
  const Trajectory traj = craft({{1.0, 0.0}, {0.5, 0.0}}, 0.5);
  const BoundReport rep = check_last_iterate(traj, series({1.0, 1.1}), {0.0, 0.0});
  const BoundPart& step = rep.parts.at(0);
  CHECK_FALSE(step.all_satisfied);
  CHECK(step.max_violation == doctest::Approx(1.1 * 1.1 - 1.0).epsilon(1e-12));
  CHECK(step.first_violation == 0);
}

TEST_CASE("last-iterate checker: prefix becomes informative on long clean runs") {
  // r_k = 2^-k exactly, no errors: rhs(K) = 4/K; for K >= 5 that is < r_0^2.
  std::vector<Point> iterates;
  std::vector<double> values;
  for (int k = 0; k <= 6; ++k) {
    iterates.push_back({std::pow(2.0, -k), 0.0});
    values.push_back(std::pow(2.0, -k));
  }
  const Trajectory traj = craft(std::move(iterates), 0.5);
  const BoundReport rep = check_last_iterate(traj, series(std::move(values)), {0.0, 0.0});
  const BoundPart& prefix = rep.parts.at(1);
  CHECK(prefix.all_satisfied);
  CHECK(prefix.vacuous[2]);        // K=3: rhs = 4/3 > r_0^2
  CHECK_FALSE(prefix.vacuous[3]);  // K=4: rhs = 1 = r_0^2 exactly, informative
  CHECK_FALSE(prefix.vacuous[4]);  // K=5: rhs = 0.8 < 1
  CHECK_FALSE(prefix.vacuous[5]);
  CHECK(prefix.rhs[4] == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("last-iterate checker: lambda outside (0,1) keeps only the per-step part") {
  const Trajectory traj = craft({{1.0, 0.0}, {0.5, 0.0}}, 1.0);
  const BoundReport rep = check_last_iterate(traj, series({1.0, 0.5}), {0.0, 0.0});
  CHECK_FALSE(rep.applicable);
  CHECK(rep.reason.find("per-step part still checked") != std::string::npos);
  REQUIRE(rep.parts.size() == 1);
  CHECK(rep.parts[0].name == "per-step");
  CHECK(rep.parts[0].all_satisfied);
}

TEST_CASE("la2 checker: passes on a compliant run and reports its conditions") {
  const ProblemSpec p = quadratic_from_constants(1.0, -0.15);
  SolverParams params;
  params.gamma = 1.0 / std::sqrt(3.0);
  params.lambda = 0.05;
  params.tau = 2;
  params.iterations = 300;
  const Trajectory traj = lookahead_run(p, LookaheadBase::Gda, params, {1.0, 0.0});
  const BoundReport rep = check_la2_bound(traj, p, *p.known_zero);
  CHECK(rep.applicable);
  REQUIRE(rep.parts.size() == 1);
  CHECK(rep.parts[0].all_satisfied);
  CHECK(rep.parts[0].lhs.size() == static_cast<std::size_t>(traj.steps()));

  // lambda = 0.3 violates 2*rho >= 2*lambda*gamma - (1 - gamma^2 L^2)*gamma.
  SolverParams bad = params;
  bad.lambda = 0.3;
  const Trajectory tb = lookahead_run(p, LookaheadBase::Gda, bad, {1.0, 0.0});
  const BoundReport rb = check_la2_bound(tb, p, *p.known_zero);
  CHECK_FALSE(rb.applicable);
  CHECK_FALSE(rb.reason.empty());

  // lambda >= 1/2 violates the first condition (short run: this setting
  // slowly diverges, which is exactly why the theorem excludes it).
  SolverParams half = params;
  half.lambda = 0.6;
  half.iterations = 20;
  const Trajectory th = lookahead_run(p, LookaheadBase::Gda, half, {1.0, 0.0});
  CHECK_FALSE(check_la2_bound(th, p, *p.known_zero).applicable);
}

TEST_CASE("cegplus checker: all three parts pass under the stepsize conditions") {
  const ProblemSpec p = quadratic_from_constants(1.0, -0.3);
  SolverParams params;
  params.gamma = 0.9;
  params.alpha = 0.1;
  params.iterations = 500;
  const Trajectory traj = iterate_run(p, PlainMethod::CegPlus, params, {1.0, 0.5});
  const BoundReport rep = check_cegplus_bounds(traj, p, *p.known_zero);
  CHECK(rep.applicable);
  REQUIRE(rep.parts.size() == 3);
  CHECK(rep.parts[0].name == "fejer");
  CHECK(rep.parts[1].name == "residual");
  CHECK(rep.parts[2].name == "distance");
  for (const auto& part : rep.parts) CHECK(part.all_satisfied);
}

TEST_CASE("cegplus checker: parts go inapplicable when their conditions fail") {
  // gamma = 1/L: the residual part needs gamma*L < 1 and drops out; the
  // distance part survives (alpha < 1 + 2*rho/gamma still holds).
  const ProblemSpec p = quadratic_from_constants(1.0, -0.3);
  SolverParams params;
  params.gamma = 1.0;
  params.alpha = 0.1;
  params.iterations = 100;
  const Trajectory traj = iterate_run(p, PlainMethod::CegPlus, params, {1.0, 0.5});
  const BoundReport rep = check_cegplus_bounds(traj, p, *p.known_zero);
  REQUIRE(rep.parts.size() == 2);
  CHECK(rep.parts[0].name == "fejer");
  CHECK(rep.parts[1].name == "distance");
  CHECK(rep.reason.find("residual part inapplicable") != std::string::npos);

  // A trajectory without half-step points cannot be checked.
  Trajectory bare = craft({{1.0, 0.0}, {0.5, 0.0}}, 0.5);
  bare.params.gamma = 0.9;
  CHECK_THROWS_AS(check_cegplus_bounds(bare, p, *p.known_zero), DiagnosticsError);
}

TEST_CASE("cegplus checker: FBF trajectories are checked at alpha = 1/2") {
  const ProblemSpec p = quadratic_from_constants(1.0, 0.2);
  SolverParams params;
  params.gamma = 0.8;  // alpha cap 1 + 2*rho/gamma = 1.5 > 1/2
  params.iterations = 200;
  const Trajectory traj = iterate_run(p, PlainMethod::Fbf, params, {1.0, 0.5});
  const BoundReport rep = check_cegplus_bounds(traj, p, *p.known_zero);
  CHECK(rep.applicable);
  for (const auto& part : rep.parts) CHECK(part.all_satisfied);
}

TEST_CASE("H-cocoercivity holds on every built-in field at gamma <= 1/L") {
  for (const ProblemSpec& p :
       {quadratic_from_constants(1.0, -1.0 / 3.0), polar_game_field(), forsaken_field(0.45)}) {
    const double L = *p.field.lipschitz;
    for (double scale : {1.0, 0.5}) {
      const CocoercivityReport rep = check_h_cocoercivity(p, scale / L, 10000, 7);
      CHECK(rep.satisfied);
      CHECK(rep.pairs == 10000);
      CHECK(rep.min_margin >= -1e-9);
    }
  }
}

TEST_CASE("H-cocoercivity validation") {
  const ProblemSpec p = quadratic_field(1.0, 0.0);
  CHECK_THROWS_AS(check_h_cocoercivity(p, 0.0, 10, 0), ParameterError);
  CHECK_THROWS_AS(check_h_cocoercivity(p, 1.5, 10, 0), ParameterError);  // gamma*L > 1
  CHECK_THROWS_AS(check_h_cocoercivity(p, 0.5, 0, 0), ParameterError);

  ProblemSpec no_meta = p;
  no_meta.field.lipschitz.reset();
  CHECK_THROWS_AS(check_h_cocoercivity(no_meta, 0.5, 10, 0), DiagnosticsError);
}

TEST_CASE("slope fit: exact power laws and edge cases") {
  // values[k] = k^-1 -> log r^2 slope is exactly -2.
  ResidualSeries s;
  s.values.push_back(1.0);  // k = 0 entry, never a checkpoint
  for (long k = 1; k <= 1000; ++k) s.values.push_back(1.0 / static_cast<double>(k));
  const SlopeFit f1 = slope_fit(s, {10, 100, 1000});
  REQUIRE(f1.slope.has_value());
  CHECK(*f1.slope == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK_FALSE(f1.converged_exactly);

  // Flat series: slope 0.
  ResidualSeries flat;
  flat.values.assign(101, 0.25);
  const SlopeFit f2 = slope_fit(flat, {1, 10, 100});
  CHECK(*f2.slope == doctest::Approx(0.0).epsilon(1e-12));

  // Exact zero at a checkpoint: converged, no finite slope.
  ResidualSeries zero;
  zero.values = {1.0, 0.5, 0.0};
  const SlopeFit f3 = slope_fit(zero, {1, 2});
  CHECK(f3.converged_exactly);
  CHECK_FALSE(f3.slope.has_value());

  CHECK_THROWS_AS(slope_fit(s, {10}), ParameterError);            // < 2 checkpoints
  CHECK_THROWS_AS(slope_fit(s, {0, 10}), ParameterError);         // checkpoint < 1
  CHECK_THROWS_AS(slope_fit(s, {10, 100000}), ParameterError);    // out of range
  CHECK_THROWS_AS(slope_fit(s, {10, 10}), ParameterError);        // identical points
}

TEST_CASE("estimated residual: tau_ref 50 vs 100 agree to the contraction envelope") {
  // The inner loop contracts toward the true resolvent with modulus gamma*L,
  // so two estimates from the same point differ by at most
  //   ((gL)^50 + (gL)^100) * ||z - J z||  <=  2 (gL)^50 * diam
  // over the sampling box; a small absolute cushion absorbs the rounding of
  // the two inner loops themselves.
  const ProblemSpec p = forsaken_field(0.45);
  const double gamma = 0.5 / *p.field.lipschitz;
  const double diam = std::sqrt(18.0);  // [-1.5, 1.5]^2
  const double bound = 2.0 * std::pow(0.5, 50) * diam + 5e-14;

  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    const Point z = {coord(rng), coord(rng)};
    const double r50 = residual(p, z, gamma, ResidualKind::EstimatedResolvent, 50);
    const double r100 = residual(p, z, gamma, ResidualKind::EstimatedResolvent, 100);
    CHECK(std::fabs(r50 - r100) <= bound);
  }
}

TEST_CASE("estimated residual matches the exact resolvent residual on linear fields") {
  // On a linear field both kinds target the same ||z - J z||; after tau_ref
  // contraction steps the estimate is within (gamma*L)^tau_ref of it
  // (relative), plus floating-point noise.
  const ProblemSpec p = quadratic_from_constants(1.0, -0.3);
  const double gamma = 0.5;  // gamma * L = 0.5
  const double factor = std::pow(0.5, 50);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const Point z = {coord(rng), coord(rng)};
    const double exact = residual(p, z, gamma, ResidualKind::ExactResolvent);
    const double est = residual(p, z, gamma, ResidualKind::EstimatedResolvent, 50);
    CHECK(std::fabs(est - exact) <= factor * exact + 5e-15 * (1.0 + exact));
  }
}

TEST_CASE("relaxed pp with a tight inner loop has nonincreasing exact residuals") {
  // With sigma0 = 0 and the resolvent emulated far below the residual scale,
  // ||z^k - J z^k|| contracts at every outer step. The relative slack covers
  // rounding; the run is kept short enough that the iterates stay well above
  // the inner tolerance floor.
  const ProblemSpec p = quadratic_from_constants(1.0, -0.3);
  SolverParams sp;
  sp.gamma = 0.7;
  sp.lambda = 0.5;
  sp.iterations = 200;
  const Trajectory traj = relaxed_pp_run(p, sp, {1.0, 1.0}, 1e-14);
  REQUIRE(traj.iterates.size() == 201);

  const ResidualSeries rs = residual_series(p, traj, sp.gamma, ResidualKind::ExactResolvent);
  REQUIRE(rs.values.size() == traj.iterates.size());
  CHECK(rs.values.front() > 1e-3);   // the run starts far from the zero
  CHECK(rs.values.back() < rs.values.front());
  for (std::size_t k = 0; k + 1 < rs.values.size(); ++k) {
    CHECK(rs.values[k + 1] <= rs.values[k] * (1.0 + 1e-12) + 1e-15);
  }
}
