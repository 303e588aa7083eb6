#include "interp_solve/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace interp_solve {
namespace {

// Fills the satisfied/violation summary of a part from its lhs/rhs arrays.
void finalize_part(BoundPart& part, double tol) {
  part.satisfied.assign(part.lhs.size(), true);
  part.all_satisfied = true;
  part.max_violation = 0.0;
  part.first_violation = -1;
  for (std::size_t i = 0; i < part.lhs.size(); ++i) {
    const double gap = part.lhs[i] - part.rhs[i];
    if (gap > tol) {
      part.satisfied[i] = false;
      part.all_satisfied = false;
      if (part.first_violation < 0) part.first_violation = static_cast<long>(i);
    }
    part.max_violation = std::max(part.max_violation, gap);
  }
}

// Common preamble of the KM-style checkers: shape validation plus the pieces
// every bound needs (distances to z*, per-step errors, lambda).
struct CheckContext {
  long K = 0;                     // completed outer steps
  double lambda = 0.0;
  double D0 = 0.0;                // ||z^0 - z*||
  double D_max = 0.0;
  std::vector<double> dists;      // ||z^k - z*||, k = 0..K
  std::vector<double> errors;     // ||e^k||, k = 0..K-1 (zeros when exact)
};

CheckContext make_context(const Trajectory& traj, const ResidualSeries& residuals,
                          const Point& z_star) {
  if (traj.iterates.empty()) throw DiagnosticsError("bound check: empty trajectory");
  if (z_star.size() != traj.dim()) throw DimensionError("bound check: z_star dimension mismatch");
  if (residuals.values.size() < traj.iterates.size()) {
    throw DiagnosticsError("bound check: residual series shorter than the trajectory");
  }
  CheckContext ctx;
  ctx.K = traj.steps();
  ctx.lambda = traj.params.lambda;
  ctx.dists.reserve(traj.iterates.size());
  for (const auto& z : traj.iterates) ctx.dists.push_back(dist(z, z_star));
  ctx.D0 = ctx.dists.front();
  ctx.D_max = *std::max_element(ctx.dists.begin(), ctx.dists.end());
  if (traj.recorded_errors) {
    if (static_cast<long>(traj.recorded_errors->size()) < ctx.K) {
      throw DiagnosticsError("bound check: recorded error series shorter than the trajectory");
    }
    ctx.errors.assign(traj.recorded_errors->begin(), traj.recorded_errors->begin() + ctx.K);
  } else {
    if (traj.params.sigma0 > 0.0) {
      throw DiagnosticsError("bound check: noisy run without recorded inexactness");
    }
    ctx.errors.assign(static_cast<std::size_t>(ctx.K), 0.0);
  }
  return ctx;
}

}  // namespace

std::string to_string(ResidualKind k) {
  switch (k) {
    case ResidualKind::ExactResolvent: return "exact";
    case ResidualKind::EstimatedResolvent: return "estimated";
    case ResidualKind::OperatorNorm: return "opnorm";
    case ResidualKind::StepNorm: return "stepnorm";
  }
  return "unknown";
}

ResidualKind residual_kind_from_string(const std::string& s) {
  if (s == "exact") return ResidualKind::ExactResolvent;
  if (s == "estimated") return ResidualKind::EstimatedResolvent;
  if (s == "opnorm") return ResidualKind::OperatorNorm;
  if (s == "stepnorm") return ResidualKind::StepNorm;
  throw ParameterError("unknown residual kind: " + s);
}

ResidualKind default_residual_kind(const ProblemSpec& p) {
  if (p.linear() && !p.constrained()) return ResidualKind::ExactResolvent;
  if (!p.constrained()) return ResidualKind::OperatorNorm;
  return ResidualKind::StepNorm;
}

double residual(const ProblemSpec& p, const Point& z, double gamma, ResidualKind kind,
                long tau_ref) {
  if (gamma <= 0.0) throw ParameterError("residual: gamma must be positive");
  switch (kind) {
    case ResidualKind::ExactResolvent:
      return dist(z, exact_resolvent(p, gamma, z));
    case ResidualKind::EstimatedResolvent: {
      StochasticOracle oracle(p.field, 0.0, 0);
      return dist(z, approx_prox(oracle, p.resolvent, z, gamma, tau_ref, 1));
    }
    case ResidualKind::OperatorNorm:
      if (p.constrained()) {
        throw UnsupportedError("residual: operator norm is meaningful for unconstrained problems only");
      }
      return norm(p.field.eval(z));
    case ResidualKind::StepNorm:
      return dist(z, p.resolvent.apply(gamma, axpy(z, -gamma, p.field.eval(z))));
  }
  throw ParameterError("residual: unknown kind");
}

ResidualSeries residual_series(const ProblemSpec& p, const Trajectory& traj, double gamma,
                               ResidualKind kind, long tau_ref) {
  ResidualSeries s;
  s.kind = kind;
  s.gamma = gamma;
  s.estimate = kind == ResidualKind::EstimatedResolvent;
  s.values.reserve(traj.iterates.size());
  for (const auto& z : traj.iterates) s.values.push_back(residual(p, z, gamma, kind, tau_ref));
  return s;
}

BoundReport check_km_bound(const Trajectory& traj, const ResidualSeries& residuals,
                           const Point& z_star, double tol) {
  CheckContext ctx = make_context(traj, residuals, z_star);
  BoundReport report;
  report.name = "km";
  report.initial_distance = ctx.D0;
  report.D_estimate = ctx.D_max;
  if (!(ctx.lambda > 0.0 && ctx.lambda < 1.0)) {
    report.applicable = false;
    report.reason = "averaged bound needs lambda in (0, 1)";
    return report;
  }
  BoundPart part;
  part.name = "averaged-residual";
  const double denom = ctx.lambda * (1.0 - ctx.lambda);
  double sum_r2 = 0.0, sum_eps = 0.0;
  for (long K = 1; K <= ctx.K; ++K) {
    const double r = residuals.values[static_cast<std::size_t>(K - 1)];
    const double e = ctx.errors[static_cast<std::size_t>(K - 1)];
    sum_r2 += r * r;
    sum_eps += 2.0 * ctx.lambda * e * ctx.dists[static_cast<std::size_t>(K - 1)] +
               ctx.lambda * ctx.lambda * e * e;
    part.lhs.push_back(sum_r2 / static_cast<double>(K));
    part.rhs.push_back((ctx.D0 * ctx.D0 + sum_eps) / (denom * static_cast<double>(K)));
  }
  finalize_part(part, tol);
  report.parts.push_back(std::move(part));
  return report;
}

BoundReport check_last_iterate(const Trajectory& traj, const ResidualSeries& residuals,
                               const Point& z_star, double tol) {
  CheckContext ctx = make_context(traj, residuals, z_star);
  BoundReport report;
  report.name = "last";
  report.initial_distance = ctx.D0;
  report.D_estimate = ctx.D_max;

  // delta_k = 4 ||e^k|| (||z^{k+1} - z*|| + ||z^k - z*||).
  std::vector<double> delta(static_cast<std::size_t>(ctx.K), 0.0);
  for (long k = 0; k < ctx.K; ++k) {
    delta[static_cast<std::size_t>(k)] =
        4.0 * ctx.errors[static_cast<std::size_t>(k)] *
        (ctx.dists[static_cast<std::size_t>(k + 1)] + ctx.dists[static_cast<std::size_t>(k)]);
  }

  BoundPart step;
  step.name = "per-step";
  for (long k = 1; k <= ctx.K; ++k) {
    const double rk = residuals.values[static_cast<std::size_t>(k)];
    const double rp = residuals.values[static_cast<std::size_t>(k - 1)];
    step.lhs.push_back(rk * rk);
    step.rhs.push_back(rp * rp + delta[static_cast<std::size_t>(k - 1)]);
  }
  finalize_part(step, tol);
  report.parts.push_back(std::move(step));

  if (!(ctx.lambda > 0.0 && ctx.lambda < 1.0)) {
    report.applicable = false;
    report.reason = "prefix bound needs lambda in (0, 1); per-step part still checked";
    return report;
  }
  BoundPart prefix;
  prefix.name = "prefix";
  const double denom = ctx.lambda * (1.0 - ctx.lambda);
  const double r0 = residuals.values.front();
  double sum_eps = 0.0, sum_weighted_delta = 0.0;
  for (long K = 1; K <= ctx.K; ++K) {
    const double e = ctx.errors[static_cast<std::size_t>(K - 1)];
    sum_eps += 2.0 * ctx.lambda * e * ctx.dists[static_cast<std::size_t>(K - 1)] +
               ctx.lambda * ctx.lambda * e * e;
    // sum_{k<K} sum_{j=k}^{K-1} delta_j = sum_{j<K} (j+1) delta_j.
    sum_weighted_delta += static_cast<double>(K) * delta[static_cast<std::size_t>(K - 1)];
    const double rK = residuals.values[static_cast<std::size_t>(K)];
    const double rhs = (ctx.D0 * ctx.D0 + sum_eps) / (denom * static_cast<double>(K)) +
                       sum_weighted_delta / static_cast<double>(K);
    prefix.lhs.push_back(rK * rK);
    prefix.rhs.push_back(rhs);
    prefix.vacuous.push_back(rhs > r0 * r0 + tol);
  }
  finalize_part(prefix, tol);
  report.parts.push_back(std::move(prefix));
  return report;
}

BoundReport check_la2_bound(const Trajectory& traj, const ProblemSpec& p, const Point& z_star,
                            double tol) {
  if (traj.iterates.empty()) throw DiagnosticsError("check_la2_bound: empty trajectory");
  if (z_star.size() != traj.dim()) throw DimensionError("check_la2_bound: z_star dimension mismatch");
  if (!p.field.lipschitz || !p.field.comonotonicity) {
    throw DiagnosticsError("check_la2_bound: problem needs (L, rho) metadata");
  }
  const double L = *p.field.lipschitz;
  const double rho = *p.field.comonotonicity;
  const double gamma = traj.params.gamma;
  const double lambda = traj.params.lambda;

  BoundReport report;
  report.name = "la2";
  report.initial_distance = dist(traj.iterates.front(), z_star);
  auto inapplicable = [&](const std::string& why) {
    report.applicable = false;
    report.reason = why;
    return report;
  };
  if (!(lambda > 0.0 && lambda < 0.5)) return inapplicable("needs lambda in (0, 1/2)");
  if (gamma * L > 1.0) return inapplicable("needs gamma <= 1/L");
  if (!(2.0 * rho > -(1.0 - 2.0 * lambda) * gamma)) {
    return inapplicable("needs 2*rho > -(1 - 2*lambda)*gamma");
  }
  if (!(2.0 * rho >= 2.0 * lambda * gamma - (1.0 - gamma * gamma * L * L) * gamma)) {
    return inapplicable("needs 2*rho >= 2*lambda*gamma - (1 - gamma^2 L^2)*gamma");
  }

  const double coeff = lambda * gamma * ((1.0 - 2.0 * lambda) * gamma + 2.0 * rho);
  BoundPart part;
  part.name = "averaged-Fzbar";
  const double D0 = report.initial_distance;
  double sum = 0.0, d_max = D0;
  for (long K = 1; K <= traj.steps(); ++K) {
    const Point& z = traj.iterates[static_cast<std::size_t>(K - 1)];
    d_max = std::max(d_max, dist(z, z_star));
    const Point zbar = axpy(z, -gamma, p.field.eval(z));
    const double f = norm(p.field.eval(zbar));
    sum += f * f;
    part.lhs.push_back(sum / static_cast<double>(K));
    part.rhs.push_back(D0 * D0 / (coeff * static_cast<double>(K)));
  }
  report.D_estimate = d_max;
  finalize_part(part, tol);
  report.parts.push_back(std::move(part));
  return report;
}

BoundReport check_cegplus_bounds(const Trajectory& traj, const ProblemSpec& p,
                                 const Point& z_star, double tol) {
  if (traj.iterates.empty()) throw DiagnosticsError("check_cegplus_bounds: empty trajectory");
  if (z_star.size() != traj.dim()) {
    throw DimensionError("check_cegplus_bounds: z_star dimension mismatch");
  }
  if (!traj.aux_iterates ||
      static_cast<long>(traj.aux_iterates->size()) < traj.steps()) {
    throw DiagnosticsError("check_cegplus_bounds: trajectory carries no half-step points");
  }
  const double gamma = traj.params.gamma;
  const double alpha = traj.solver == "fbf" ? 0.5 : traj.params.alpha;
  const auto& L = p.field.lipschitz;
  const auto& rho = p.field.comonotonicity;

  BoundReport report;
  report.name = "cegplus";
  const double D0 = dist(traj.iterates.front(), z_star);
  report.initial_distance = D0;

  std::vector<double> dists;
  dists.reserve(traj.iterates.size());
  for (const auto& z : traj.iterates) dists.push_back(dist(z, z_star));
  report.D_estimate = *std::max_element(dists.begin(), dists.end());

  // (i) Fejer monotonicity toward z*.
  BoundPart fejer;
  fejer.name = "fejer";
  for (long k = 1; k <= traj.steps(); ++k) {
    fejer.lhs.push_back(dists[static_cast<std::size_t>(k)]);
    fejer.rhs.push_back(dists[static_cast<std::size_t>(k - 1)]);
  }
  finalize_part(fejer, tol);
  report.parts.push_back(std::move(fejer));

  // Prefix sums shared by (ii) and (iii).
  const long K = traj.steps();
  std::vector<double> res2(static_cast<std::size_t>(K)), dist2(static_cast<std::size_t>(K));
  for (long k = 0; k < K; ++k) {
    const Point& z = traj.iterates[static_cast<std::size_t>(k)];
    const Point& zbar = (*traj.aux_iterates)[static_cast<std::size_t>(k)];
    const double r = dist(z, zbar);
    res2[static_cast<std::size_t>(k)] = r * r;
    const Point Hz = axpy(z, -gamma, p.field.eval(z));
    const Point Hzbar = axpy(zbar, -gamma, p.field.eval(zbar));
    const double d = dist(Hz, Hzbar) / gamma;  // dist(0, S zbar)
    dist2[static_cast<std::size_t>(k)] = d * d;
  }

  const bool alpha_in_cap = !rho || alpha < 1.0 + 2.0 * *rho / gamma;

  // (ii) averaged squared half-step displacement.
  BoundPart res_part;
  res_part.name = "residual";
  if (!L) {
    // cannot evaluate the rhs at all
  } else if (gamma * *L >= 1.0 || alpha > 1.0 || !alpha_in_cap) {
    // theorem conditions fail; recorded as inapplicable below
  } else {
    const double coeff = alpha * (1.0 - gamma * gamma * *L * *L);
    double sum = 0.0;
    for (long k = 1; k <= K; ++k) {
      sum += res2[static_cast<std::size_t>(k - 1)];
      res_part.lhs.push_back(sum / static_cast<double>(k));
      res_part.rhs.push_back(D0 * D0 / (coeff * static_cast<double>(k)));
    }
  }
  if (res_part.lhs.empty()) {
    report.reason += "residual part inapplicable (needs gamma < 1/L, alpha <= 1, alpha < 1 + 2*rho/gamma); ";
  } else {
    finalize_part(res_part, tol);
    report.parts.push_back(std::move(res_part));
  }

  // (iii) averaged squared distance of 0 to S(zbar).
  BoundPart dist_part;
  dist_part.name = "distance";
  if (rho && alpha < 1.0 && alpha_in_cap) {
    const double coeff = alpha * gamma * gamma * (1.0 + 2.0 * *rho / gamma - alpha);
    double sum = 0.0;
    for (long k = 1; k <= K; ++k) {
      sum += dist2[static_cast<std::size_t>(k - 1)];
      dist_part.lhs.push_back(sum / static_cast<double>(k));
      dist_part.rhs.push_back(D0 * D0 / (coeff * static_cast<double>(k)));
    }
    finalize_part(dist_part, tol);
    report.parts.push_back(std::move(dist_part));
  } else {
    report.reason += "distance part inapplicable (needs rho metadata, alpha < 1, alpha < 1 + 2*rho/gamma)";
  }
  return report;
}

CocoercivityReport check_h_cocoercivity(const ProblemSpec& p, double gamma, std::size_t samples,
                                        std::uint64_t seed, double tol) {
  if (gamma <= 0.0) throw ParameterError("check_h_cocoercivity: gamma must be positive");
  if (samples == 0) throw ParameterError("check_h_cocoercivity: samples must be >= 1");
  if (!p.field.lipschitz) throw DiagnosticsError("check_h_cocoercivity: L metadata required");
  const double L = *p.field.lipschitz;
  if (gamma * L > 1.0) throw ParameterError("check_h_cocoercivity: needs gamma <= 1/L");

  const Box box = p.sampling_box();
  const double curvature = 0.5 * (1.0 - gamma * gamma * L * L);
  CocoercivityReport rep;
  rep.pairs = samples;
  bool first = true;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng r0 = Rng::substream(seed, i, 0);
    Rng r1 = Rng::substream(seed, i, 1);
    const Point z = box.sample(r0);
    const Point zp = box.sample(r1);
    const Point Hz = axpy(z, -gamma, p.field.eval(z));
    const Point Hzp = axpy(zp, -gamma, p.field.eval(zp));
    const Point dH = sub(Hzp, Hz);
    const Point dz = sub(zp, z);
    const double margin = dot(dH, dz) - 0.5 * dot(dH, dH) - curvature * dot(dz, dz);
    if (first || margin < rep.min_margin) rep.min_margin = margin;
    first = false;
  }
  rep.satisfied = rep.min_margin >= -tol;
  return rep;
}

SlopeFit slope_fit(const ResidualSeries& series, const std::vector<long>& checkpoints) {
  if (checkpoints.size() < 2) throw ParameterError("slope_fit: need at least two checkpoints");
  std::vector<double> xs, ys;
  SlopeFit fit;
  for (long k : checkpoints) {
    if (k < 1 || k >= static_cast<long>(series.values.size())) {
      throw ParameterError("slope_fit: checkpoint " + std::to_string(k) + " out of range");
    }
    const double r = series.values[static_cast<std::size_t>(k)];
    if (r == 0.0) {
      fit.converged_exactly = true;
      return fit;
    }
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(2.0 * std::log(r));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  if (den == 0.0) throw ParameterError("slope_fit: checkpoints must include two distinct iterations");
  fit.slope = num / den;
  return fit;
}

}  // namespace interp_solve
