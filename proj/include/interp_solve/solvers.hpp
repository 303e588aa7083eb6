#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "interp_solve/core.hpp"
#include "interp_solve/problems.hpp"

namespace interp_solve {

// Iterates whose norm passes this are treated as diverged.
inline constexpr double kDivergenceNorm = 1e12;

enum class BatchMode { Fixed, BestIterate, LastIterate };
enum class TauMode { Best, Last };

// Inner-loop horizon that makes the proximal-point error match the target
// accuracy: Best -> ceil(log K / log(1/(gamma L))), Last -> twice that
// exponent (error ~ 1/K^2). Always at least 1. Requires gammaL in (0, 1).
long tau_schedule(long K, double gammaL, TauMode mode);

// Growing minibatch for the stochastic variants: BestIterate -> k^2,
// LastIterate -> k^3 (k >= 1). Fixed batches come from SolverParams instead.
std::uint64_t batch_schedule(long k, BatchMode mode);

struct SolverParams {
  double gamma = 0.5;   // step size
  double lambda = 0.5;  // relaxation / interpolation weight
  double alpha = 0.5;   // CEG+ multiplier (the applied coefficient is 2*alpha)
  long tau = 1;         // inner horizon (approx-prox / lookahead)
  long iterations = 100;  // outer step count K
  double sigma0 = 0.0;  // oracle noise level
  BatchMode batch_mode = BatchMode::Fixed;
  std::uint64_t batch_n = 1;
  std::uint64_t seed = 0;
  // strict=true enforces the theory ranges (gamma*L < 1, lambda in (0,1), ...)
  // with ParameterError; strict=false runs anyway and records a warning, which
  // is how the out-of-theory reference configurations (gamma = 4/L, lambda = 1)
  // are reproduced.
  bool strict = true;
  std::optional<double> target_residual;
  std::optional<std::uint64_t> max_oracle_calls;
  // Residual used for target stopping; installed by the runner so the solver
  // layer stays independent of the diagnostics layer.
  std::function<double(const Point&)> stop_residual_fn;
};

enum class StopReason { Completed, TargetReached, BudgetExhausted, Diverged };

std::string to_string(StopReason r);

struct Trajectory {
  std::vector<Point> iterates;              // z^0 .. z^K
  std::vector<std::uint64_t> oracle_calls;  // cumulative, aligned with iterates
  // Auxiliary points when the method has them (w^tau_k, or the half-step
  // points z_bar^k of CEG+/FBF), aligned with iterates[1..].
  std::optional<std::vector<Point>> aux_iterates;
  // ||e^k|| for k = 0..K-1 when an inexactness record is available.
  std::optional<std::vector<double>> recorded_errors;
  bool errors_are_estimates = false;
  std::vector<std::string> warnings;
  StopReason stop_reason = StopReason::Completed;
  std::string solver;
  std::string problem;
  SolverParams params;

  std::size_t dim() const { return iterates.empty() ? 0 : iterates.front().size(); }
  long steps() const { return static_cast<long>(iterates.size()) - 1; }
};

// Inner fixed-point loop failed to reach its tolerance within the cap.
struct ConvergenceError : Error {
  Trajectory partial;
  ConvergenceError(const std::string& msg, Trajectory t) : Error(msg), partial(std::move(t)) {}
};

// An iterate left the ||z|| <= kDivergenceNorm guard region.
struct DivergenceError : Error {
  Trajectory partial;
  DivergenceError(const std::string& msg, Trajectory t) : Error(msg), partial(std::move(t)) {}
};

// ---- single steps (deterministic field) -----------------------------------

// z - gamma*F(z).
Point gda_step(const VectorField& F, const Point& z, double gamma);

// Extragradient: z - gamma*F(z - gamma*F(z)).
Point eg_step(const VectorField& F, const Point& z, double gamma);

// EG+: (1-lambda)*z + lambda*EG(z), lambda in (0, 1).
Point egplus_step(const VectorField& F, const Point& z, double gamma, double lambda);

// CEG+ with H = id - gamma*F and w_bar = J_{gamma A}(H z):
//   z + 2*alpha*(H(w_bar) - H(z)).
Point cegplus_step(const VectorField& F, const ResolventMap& A, const Point& z, double gamma,
                   double alpha);

// Forward-backward-forward: z - (H(z) - H(z_bar)), z_bar = J_{gamma A}(H z).
// Equals cegplus_step with alpha = 1/2.
Point fbf_step(const VectorField& F, const ResolventMap& A, const Point& z, double gamma);

// One outer step of two-step lookahead over GDA, in closed form:
//   1/2*(z - 2*lambda*gamma*F(z)) + 1/2*(z - 2*lambda*gamma*F(z - gamma*F(z))).
Point la_gda_tau2_closed_form(const VectorField& F, const Point& z, double gamma, double lambda);

// ---- iterations ------------------------------------------------------------

// Krasnoselskii-Mann over an arbitrary operator T:
//   z^{k+1} = (1-lambda)*z^k + lambda*T(z^k).
// Each T application is accounted as `calls_per_step` oracle calls so the
// cumulative call column stays strictly increasing even for abstract maps.
Trajectory km_iterate(const std::function<Point(const Point&)>& T, const Point& z0, double lambda,
                      long K, std::uint64_t calls_per_step = 1);

// Inexact proximal-point inner loop: w^0 = z and
//   w^{t+1} = J_{gamma A}(z - gamma * F^(w^t, batch)),   t = 0..tau-1,
// returning w^tau. A Banach contraction toward J_{gamma S}(z) with modulus
// gamma*L when gamma*L < 1; enforces that whenever L metadata is present.
// Draws use sub-streams (outer_k, t).
Point approx_prox(StochasticOracle& oracle, const ResolventMap& A, const Point& z, double gamma,
                  long tau, std::uint64_t batch, std::uint64_t outer_k = 0);

// Relaxed approximate proximal point: K outer steps of
//   w = approx-prox inner loop from z^k (tau steps, batch n_k),
//   z^{k+1} = (1-lambda)*z^k + lambda*w.
// Records ||e^k|| against a closed-form resolvent for linear problems, or a
// 4*tau-step deterministic reference when gamma*L < 1 (flagged as estimate).
Trajectory rapp_run(const ProblemSpec& problem, const SolverParams& params, const Point& z0);

// Relaxed proximal point with the resolvent emulated to `inner_tol`: the inner
// loop runs until the step shrinks below inner_tol (cap 10^6 inner steps,
// ConvergenceError beyond). Deterministic; the reference implicit scheme.
Trajectory relaxed_pp_run(const ProblemSpec& problem, const SolverParams& params, const Point& z0,
                          double inner_tol);

// KM over the exact closed-form resolvent (unconstrained linear problems only).
Trajectory km_exact_run(const ProblemSpec& problem, const SolverParams& params, const Point& z0);

enum class LookaheadBase { Gda, Eg, CegPlus };

// Lookahead wrapper: tau inner base steps from z^k, then interpolation
//   z^{k+1} = (1-lambda)*z^k + lambda*w^tau.
// Gda/Eg inner steps are the unconstrained updates (the box, if any, is not
// applied inside them); CegPlus is the constraint-aware base.
Trajectory lookahead_run(const ProblemSpec& problem, LookaheadBase base,
                         const SolverParams& params, const Point& z0);

enum class PlainMethod { Gda, Eg, EgPlus, CegPlus, Fbf };

// Plain repeated stepping of one of the explicit methods.
Trajectory iterate_run(const ProblemSpec& problem, PlainMethod method, const SolverParams& params,
                       const Point& z0);

}  // namespace interp_solve
