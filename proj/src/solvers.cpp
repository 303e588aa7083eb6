#include "interp_solve/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace interp_solve {
namespace {

constexpr long kInnerLoopCap = 1000000;

void check_divergence(Trajectory& traj, const Point& z, const std::string& who) {
  if (!all_finite(z) || norm(z) > kDivergenceNorm) {
    traj.stop_reason = StopReason::Diverged;
    throw DivergenceError(who + ": iterate diverged (non-finite or ||z|| > 1e12)", traj);
  }
}

// Theory-range validation: hard error when strict, recorded warning otherwise.
void enforce(bool ok, const SolverParams& params, Trajectory& traj, const std::string& msg) {
  if (ok) return;
  if (params.strict) throw ParameterError(msg);
  traj.warnings.push_back("accepted out-of-theory setting (strict off): " + msg);
}

Trajectory make_traj(const ProblemSpec& problem, const SolverParams& params, const Point& z0,
                     const char* solver) {
  if (z0.size() != problem.dim()) {
    throw DimensionError(std::string(solver) + ": z0 dimension does not match the problem");
  }
  if (params.gamma <= 0.0) throw ParameterError(std::string(solver) + ": gamma must be positive");
  if (params.iterations < 0) throw ParameterError(std::string(solver) + ": K must be >= 0");
  Trajectory traj;
  traj.solver = solver;
  traj.problem = problem.name;
  traj.params = params;
  traj.iterates.push_back(z0);
  traj.oracle_calls.push_back(0);
  return traj;
}

struct BudgetGate {
  std::optional<EvalBudget> budget;

  explicit BudgetGate(const SolverParams& p) {
    if (p.max_oracle_calls) budget = EvalBudget{*p.max_oracle_calls, 0};
  }

  bool consume(std::uint64_t n) { return budget ? budget->try_consume(n) : true; }
};

bool target_reached(const SolverParams& params, const Point& z) {
  if (!params.target_residual || !params.stop_residual_fn) return false;
  return params.stop_residual_fn(z) <= *params.target_residual;
}

// Inner loop of the approximate proximal step, without the contraction
// validation (rapp_run may legitimately drive it with gamma*L >= 1 when
// strict mode is off).
Point prox_inner_loop(StochasticOracle& oracle, const ResolventMap& A, const Point& z,
                      double gamma, long tau, std::uint64_t batch, std::uint64_t outer_k) {
  Point w = z;
  for (long t = 0; t < tau; ++t) {
    w = A.apply(gamma, axpy(z, -gamma, oracle.eval_stream(w, batch, outer_k, t)));
  }
  return w;
}

void hard_lambda_range(const SolverParams& params, const char* solver) {
  // Even with strict off, lambda beyond 1 (or not positive) is meaningless.
  if (!(params.lambda > 0.0 && params.lambda <= 1.0)) {
    throw ParameterError(std::string(solver) + ": lambda must lie in (0, 1]");
  }
}

}  // namespace

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Completed: return "completed";
    case StopReason::TargetReached: return "target";
    case StopReason::BudgetExhausted: return "budget";
    case StopReason::Diverged: return "diverged";
  }
  return "unknown";
}

long tau_schedule(long K, double gammaL, TauMode mode) {
  if (K < 1) throw ParameterError("tau_schedule: K must be >= 1");
  if (!(gammaL > 0.0 && gammaL < 1.0)) throw ParameterError("tau_schedule: gammaL must lie in (0, 1)");
  const double exponent = mode == TauMode::Best ? 1.0 : 2.0;
  const double t = std::ceil(exponent * std::log(static_cast<double>(K)) / std::log(1.0 / gammaL));
  return std::max(1L, static_cast<long>(t));
}

std::uint64_t batch_schedule(long k, BatchMode mode) {
  if (k < 1) throw ParameterError("batch_schedule: k must be >= 1");
  const auto ku = static_cast<std::uint64_t>(k);
  switch (mode) {
    case BatchMode::BestIterate: return ku * ku;
    case BatchMode::LastIterate: return ku * ku * ku;
    case BatchMode::Fixed: break;
  }
  throw ParameterError("batch_schedule: fixed batch sizes come from SolverParams, not the schedule");
}

Point gda_step(const VectorField& F, const Point& z, double gamma) {
  if (gamma <= 0.0) throw ParameterError("gda_step: gamma must be positive");
  return axpy(z, -gamma, F.eval(z));
}

Point eg_step(const VectorField& F, const Point& z, double gamma) {
  if (gamma <= 0.0) throw ParameterError("eg_step: gamma must be positive");
  const Point mid = axpy(z, -gamma, F.eval(z));
  return axpy(z, -gamma, F.eval(mid));
}

Point egplus_step(const VectorField& F, const Point& z, double gamma, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("egplus_step: lambda must lie in (0, 1)");
  return interpolate(z, eg_step(F, z, gamma), lambda);
}

Point cegplus_step(const VectorField& F, const ResolventMap& A, const Point& z, double gamma,
                   double alpha) {
  if (gamma <= 0.0) throw ParameterError("cegplus_step: gamma must be positive");
  if (alpha <= 0.0) throw ParameterError("cegplus_step: alpha must be positive");
  const Point Hz = axpy(z, -gamma, F.eval(z));
  const Point wbar = A.apply(gamma, Hz);
  const Point Hwbar = axpy(wbar, -gamma, F.eval(wbar));
  return axpy(z, 2.0 * alpha, sub(Hwbar, Hz));
}

Point fbf_step(const VectorField& F, const ResolventMap& A, const Point& z, double gamma) {
  // z - (Hz - H z_bar) is exactly the CEG+ update with alpha = 1/2.
  return cegplus_step(F, A, z, gamma, 0.5);
}

Point la_gda_tau2_closed_form(const VectorField& F, const Point& z, double gamma, double lambda) {
  if (gamma <= 0.0) throw ParameterError("la_gda_tau2_closed_form: gamma must be positive");
  const Point Fz = F.eval(z);
  const Point mid = axpy(z, -gamma, Fz);
  const Point first = axpy(z, -2.0 * lambda * gamma, Fz);
  const Point second = axpy(z, -2.0 * lambda * gamma, F.eval(mid));
  return interpolate(first, second, 0.5);
}

Trajectory km_iterate(const std::function<Point(const Point&)>& T, const Point& z0, double lambda,
                      long K, std::uint64_t calls_per_step) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("km_iterate: lambda must lie in (0, 1)");
  if (K < 0) throw ParameterError("km_iterate: K must be >= 0");
  if (calls_per_step < 1) throw ParameterError("km_iterate: calls_per_step must be >= 1");
  Trajectory traj;
  traj.solver = "km";
  traj.params.lambda = lambda;
  traj.params.iterations = K;
  traj.iterates.push_back(z0);
  traj.oracle_calls.push_back(0);
  Point z = z0;
  for (long k = 0; k < K; ++k) {
    z = interpolate(z, T(z), lambda);
    traj.iterates.push_back(z);
    traj.oracle_calls.push_back(traj.oracle_calls.back() + calls_per_step);
    check_divergence(traj, z, "km_iterate");
  }
  return traj;
}

Point approx_prox(StochasticOracle& oracle, const ResolventMap& A, const Point& z, double gamma,
                  long tau, std::uint64_t batch, std::uint64_t outer_k) {
  if (gamma <= 0.0) throw ParameterError("approx_prox: gamma must be positive");
  if (tau < 1) throw ParameterError("approx_prox: tau must be >= 1");
  if (batch < 1) throw ParameterError("approx_prox: batch must be >= 1");
  if (oracle.base().lipschitz && gamma * *oracle.base().lipschitz >= 1.0) {
    throw ParameterError("approx_prox: gamma*L >= 1, the inner loop is not a contraction");
  }
  return prox_inner_loop(oracle, A, z, gamma, tau, batch, outer_k);
}

Trajectory rapp_run(const ProblemSpec& problem, const SolverParams& params, const Point& z0) {
  Trajectory traj = make_traj(problem, params, z0, "rapp");
  if (params.tau < 1) throw ParameterError("rapp: tau must be >= 1");
  hard_lambda_range(params, "rapp");
  const auto& L = problem.field.lipschitz;
  const auto& rho = problem.field.comonotonicity;
  enforce(!L || params.gamma * *L < 1.0, params, traj, "rapp: gamma*L must be < 1");
  enforce(params.lambda < 1.0, params, traj, "rapp: lambda must lie in (0, 1)");
  if (rho) {
    enforce(params.gamma > std::max(0.0, -2.0 * *rho), params, traj,
            "rapp: gamma must exceed max(0, -2*rho)");
  } else {
    traj.warnings.push_back("rapp: rho metadata unknown; stepsize lower bound not validated");
  }

  StochasticOracle oracle(problem.field, params.sigma0, params.seed);
  BudgetGate gate(params);

  // Inexactness record: exact against a closed-form resolvent when available,
  // otherwise a 4*tau deterministic reference (estimate), otherwise nothing.
  const bool exact_ref = problem.linear() && !problem.constrained();
  const bool est_ref = !exact_ref && L && params.gamma * *L < 1.0;
  traj.aux_iterates.emplace();
  if (exact_ref || est_ref) {
    traj.recorded_errors.emplace();
    traj.errors_are_estimates = est_ref;
  }

  Point z = z0;
  for (long k = 0; k < params.iterations; ++k) {
    if (target_reached(params, z)) {
      traj.stop_reason = StopReason::TargetReached;
      break;
    }
    const std::uint64_t n_k = params.batch_mode == BatchMode::Fixed
                                  ? params.batch_n
                                  : batch_schedule(k + 1, params.batch_mode);
    if (n_k < 1) throw ParameterError("rapp: batch size must be >= 1");
    const std::uint64_t per_eval = params.sigma0 > 0.0 ? n_k : 1;
    const std::uint64_t step_cost = per_eval * static_cast<std::uint64_t>(params.tau);
    if (!gate.consume(step_cost)) {
      traj.stop_reason = StopReason::BudgetExhausted;
      break;
    }
    const Point w = prox_inner_loop(oracle, problem.resolvent, z, params.gamma, params.tau, n_k,
                                    static_cast<std::uint64_t>(k));
    traj.aux_iterates->push_back(w);
    if (exact_ref) {
      traj.recorded_errors->push_back(dist(w, exact_resolvent(problem, params.gamma, z)));
    } else if (est_ref) {
      StochasticOracle ref(problem.field, 0.0, 0);
      const Point wref = prox_inner_loop(ref, problem.resolvent, z, params.gamma, 4 * params.tau, 1,
                                         static_cast<std::uint64_t>(k));
      traj.recorded_errors->push_back(dist(w, wref));
    }
    z = interpolate(z, w, params.lambda);
    traj.iterates.push_back(z);
    traj.oracle_calls.push_back(traj.oracle_calls.back() + step_cost);
    check_divergence(traj, z, "rapp");
  }
  return traj;
}

Trajectory relaxed_pp_run(const ProblemSpec& problem, const SolverParams& params, const Point& z0,
                          double inner_tol) {
  Trajectory traj = make_traj(problem, params, z0, "relaxed-pp");
  if (inner_tol <= 0.0) throw ParameterError("relaxed-pp: inner_tol must be positive");
  hard_lambda_range(params, "relaxed-pp");
  enforce(params.lambda < 1.0, params, traj, "relaxed-pp: lambda must lie in (0, 1)");
  const auto& L = problem.field.lipschitz;
  // The inner fixed-point loop only converges for gamma*L < 1; this is a hard
  // requirement of the emulation itself, independent of strict mode.
  if (L && params.gamma * *L >= 1.0) {
    throw ParameterError("relaxed-pp: gamma*L must be < 1 for the inner loop to converge");
  }
  if (!L) traj.warnings.push_back("relaxed-pp: L metadata unknown; inner-loop contraction unverified");
  if (params.sigma0 != 0.0) {
    traj.warnings.push_back("relaxed-pp ignores sigma0 (deterministic reference scheme)");
  }

  BudgetGate gate(params);
  traj.aux_iterates.emplace();
  Point z = z0;
  for (long k = 0; k < params.iterations; ++k) {
    if (target_reached(params, z)) {
      traj.stop_reason = StopReason::TargetReached;
      break;
    }
    Point w = z;
    std::uint64_t evals = 0;
    bool out_of_budget = false;
    while (true) {
      if (!gate.consume(1)) {
        out_of_budget = true;
        break;
      }
      const Point wn = problem.resolvent.apply(params.gamma, axpy(z, -params.gamma, problem.field.eval(w)));
      ++evals;
      const double step = dist(wn, w);
      w = wn;
      if (step <= inner_tol) break;
      if (evals >= static_cast<std::uint64_t>(kInnerLoopCap)) {
        throw ConvergenceError("relaxed-pp: inner loop failed to reach inner_tol within 1e6 steps",
                               traj);
      }
    }
    if (out_of_budget) {
      traj.stop_reason = StopReason::BudgetExhausted;
      break;
    }
    traj.aux_iterates->push_back(w);
    z = interpolate(z, w, params.lambda);
    traj.iterates.push_back(z);
    traj.oracle_calls.push_back(traj.oracle_calls.back() + evals);
    check_divergence(traj, z, "relaxed-pp");
  }
  return traj;
}

Trajectory km_exact_run(const ProblemSpec& problem, const SolverParams& params, const Point& z0) {
  Trajectory traj = make_traj(problem, params, z0, "km-exact");
  if (!problem.linear() || problem.constrained()) {
    throw UnsupportedError("km-exact: needs an unconstrained linear problem (closed-form resolvent)");
  }
  hard_lambda_range(params, "km-exact");
  enforce(params.lambda < 1.0, params, traj, "km-exact: lambda must lie in (0, 1)");

  BudgetGate gate(params);
  Point z = z0;
  for (long k = 0; k < params.iterations; ++k) {
    if (target_reached(params, z)) {
      traj.stop_reason = StopReason::TargetReached;
      break;
    }
    if (!gate.consume(1)) {
      traj.stop_reason = StopReason::BudgetExhausted;
      break;
    }
    z = interpolate(z, exact_resolvent(problem, params.gamma, z), params.lambda);
    traj.iterates.push_back(z);
    traj.oracle_calls.push_back(traj.oracle_calls.back() + 1);
    check_divergence(traj, z, "km-exact");
  }
  return traj;
}

namespace {

const char* lookahead_name(LookaheadBase base) {
  switch (base) {
    case LookaheadBase::Gda: return "la-gda";
    case LookaheadBase::Eg: return "la-eg";
    case LookaheadBase::CegPlus: return "la-cegplus";
  }
  return "la";
}

}  // namespace

Trajectory lookahead_run(const ProblemSpec& problem, LookaheadBase base, const SolverParams& params,
                         const Point& z0) {
  Trajectory traj = make_traj(problem, params, z0, lookahead_name(base));
  if (params.tau < 1) throw ParameterError("lookahead: tau must be >= 1");
  if (!(params.lambda > 0.0 && params.lambda < 1.0)) {
    throw ParameterError("lookahead: lambda must lie in (0, 1)");
  }
  const auto& L = problem.field.lipschitz;
  const auto& rho = problem.field.comonotonicity;
  enforce(!L || params.gamma * *L <= 1.0, params, traj, "lookahead: gamma must be <= 1/L");
  if (base == LookaheadBase::CegPlus) {
    if (params.alpha <= 0.0) throw ParameterError("lookahead: alpha must be positive");
    if (rho) {
      enforce(params.alpha < 1.0 + 2.0 * *rho / params.gamma, params, traj,
              "lookahead: alpha must lie in (0, 1 + 2*rho/gamma)");
    }
  }
  if (problem.constrained() && base != LookaheadBase::CegPlus) {
    traj.warnings.push_back("lookahead: inner gda/eg steps apply no constraint projection");
  }

  const std::uint64_t evals_per_inner = base == LookaheadBase::Gda ? 1 : 2;
  const std::uint64_t batch = params.batch_n;
  if (batch < 1) throw ParameterError("lookahead: batch size must be >= 1");
  const std::uint64_t per_eval = params.sigma0 > 0.0 ? batch : 1;
  const std::uint64_t step_cost = per_eval * evals_per_inner * static_cast<std::uint64_t>(params.tau);

  StochasticOracle oracle(problem.field, params.sigma0, params.seed);
  BudgetGate gate(params);
  traj.aux_iterates.emplace();

  Point z = z0;
  for (long k = 0; k < params.iterations; ++k) {
    if (target_reached(params, z)) {
      traj.stop_reason = StopReason::TargetReached;
      break;
    }
    if (!gate.consume(step_cost)) {
      traj.stop_reason = StopReason::BudgetExhausted;
      break;
    }
    const auto ku = static_cast<std::uint64_t>(k);
    Point w = z;
    for (long t = 0; t < params.tau; ++t) {
      const auto tu = static_cast<std::uint64_t>(t);
      switch (base) {
        case LookaheadBase::Gda: {
          w = axpy(w, -params.gamma, oracle.eval_stream(w, batch, ku, tu));
          break;
        }
        case LookaheadBase::Eg: {
          const Point mid = axpy(w, -params.gamma, oracle.eval_stream(w, batch, ku, 2 * tu));
          w = axpy(w, -params.gamma, oracle.eval_stream(mid, batch, ku, 2 * tu + 1));
          break;
        }
        case LookaheadBase::CegPlus: {
          const Point Hw = axpy(w, -params.gamma, oracle.eval_stream(w, batch, ku, 2 * tu));
          const Point wbar = problem.resolvent.apply(params.gamma, Hw);
          const Point Hwbar = axpy(wbar, -params.gamma, oracle.eval_stream(wbar, batch, ku, 2 * tu + 1));
          w = axpy(w, 2.0 * params.alpha, sub(Hwbar, Hw));
          break;
        }
      }
      if (!all_finite(w) || norm(w) > kDivergenceNorm) {
        traj.stop_reason = StopReason::Diverged;
        throw DivergenceError("lookahead: inner iterate diverged", traj);
      }
    }
    traj.aux_iterates->push_back(w);
    z = interpolate(z, w, params.lambda);
    traj.iterates.push_back(z);
    traj.oracle_calls.push_back(traj.oracle_calls.back() + step_cost);
    check_divergence(traj, z, "lookahead");
  }
  return traj;
}

Trajectory iterate_run(const ProblemSpec& problem, PlainMethod method, const SolverParams& params,
                       const Point& z0) {
  const char* name = method == PlainMethod::Gda       ? "gda"
                     : method == PlainMethod::Eg      ? "eg"
                     : method == PlainMethod::EgPlus  ? "egplus"
                     : method == PlainMethod::CegPlus ? "cegplus"
                                                      : "fbf";
  Trajectory traj = make_traj(problem, params, z0, name);
  const auto& L = problem.field.lipschitz;
  const auto& rho = problem.field.comonotonicity;
  if (method != PlainMethod::Gda) {
    enforce(!L || params.gamma * *L <= 1.0, params, traj,
            std::string(name) + ": gamma must be <= 1/L");
  }
  if (method == PlainMethod::EgPlus && !(params.lambda > 0.0 && params.lambda < 1.0)) {
    throw ParameterError("egplus: lambda must lie in (0, 1)");
  }
  if (method == PlainMethod::CegPlus) {
    if (params.alpha <= 0.0) throw ParameterError("cegplus: alpha must be positive");
    if (rho) {
      enforce(params.alpha < 1.0 + 2.0 * *rho / params.gamma, params, traj,
              "cegplus: alpha must lie in (0, 1 + 2*rho/gamma)");
    }
  }

  const std::uint64_t batch = params.batch_n;
  if (batch < 1) throw ParameterError(std::string(name) + ": batch size must be >= 1");
  const std::uint64_t per_eval = params.sigma0 > 0.0 ? batch : 1;
  const std::uint64_t evals = method == PlainMethod::Gda ? 1 : 2;
  const std::uint64_t step_cost = per_eval * evals;
  const bool has_aux = method == PlainMethod::CegPlus || method == PlainMethod::Fbf;

  StochasticOracle oracle(problem.field, params.sigma0, params.seed);
  BudgetGate gate(params);
  if (has_aux) traj.aux_iterates.emplace();

  Point z = z0;
  for (long k = 0; k < params.iterations; ++k) {
    if (target_reached(params, z)) {
      traj.stop_reason = StopReason::TargetReached;
      break;
    }
    if (!gate.consume(step_cost)) {
      traj.stop_reason = StopReason::BudgetExhausted;
      break;
    }
    const auto ku = static_cast<std::uint64_t>(k);
    switch (method) {
      case PlainMethod::Gda: {
        z = axpy(z, -params.gamma, oracle.eval_stream(z, batch, ku, 0));
        break;
      }
      case PlainMethod::Eg: {
        const Point mid = axpy(z, -params.gamma, oracle.eval_stream(z, batch, ku, 0));
        z = axpy(z, -params.gamma, oracle.eval_stream(mid, batch, ku, 1));
        break;
      }
      case PlainMethod::EgPlus: {
        const Point mid = axpy(z, -params.gamma, oracle.eval_stream(z, batch, ku, 0));
        const Point eg = axpy(z, -params.gamma, oracle.eval_stream(mid, batch, ku, 1));
        z = interpolate(z, eg, params.lambda);
        break;
      }
      case PlainMethod::CegPlus:
      case PlainMethod::Fbf: {
        const double coeff = method == PlainMethod::Fbf ? 1.0 : 2.0 * params.alpha;
        const Point Hz = axpy(z, -params.gamma, oracle.eval_stream(z, batch, ku, 0));
        const Point wbar = problem.resolvent.apply(params.gamma, Hz);
        const Point Hwbar = axpy(wbar, -params.gamma, oracle.eval_stream(wbar, batch, ku, 1));
        traj.aux_iterates->push_back(wbar);
        z = axpy(z, coeff, sub(Hwbar, Hz));
        break;
      }
    }
    traj.iterates.push_back(z);
    traj.oracle_calls.push_back(traj.oracle_calls.back() + step_cost);
    check_divergence(traj, z, name);
  }
  return traj;
}

}  // namespace interp_solve
