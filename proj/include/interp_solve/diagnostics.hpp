#pragma once

#include <optional>
#include <string>
#include <vector>

#include "interp_solve/problems.hpp"
#include "interp_solve/solvers.hpp"

namespace interp_solve {

enum class ResidualKind {
  ExactResolvent,      // ||z - (I + gamma M)^{-1} z||, linear unconstrained only
  EstimatedResolvent,  // ||z - w^{tau_ref}|| with a deterministic inner loop; needs gamma*L < 1
  OperatorNorm,        // ||F z||, unconstrained only
  StepNorm,            // ||z - J_{gamma A}(z - gamma F z)||
};

std::string to_string(ResidualKind k);
ResidualKind residual_kind_from_string(const std::string& s);

// The natural measure for a problem: exact resolvent when it exists, operator
// norm for unconstrained nonlinear fields, projected-step norm otherwise.
ResidualKind default_residual_kind(const ProblemSpec& p);

struct ResidualSeries {
  ResidualKind kind = ResidualKind::StepNorm;
  double gamma = 0.0;
  std::vector<double> values;  // aligned with Trajectory::iterates
  bool estimate = false;       // true for EstimatedResolvent
};

double residual(const ProblemSpec& p, const Point& z, double gamma, ResidualKind kind,
                long tau_ref = 32);

ResidualSeries residual_series(const ProblemSpec& p, const Trajectory& traj, double gamma,
                               ResidualKind kind, long tau_ref = 32);

// One verified inequality family: lhs[i] <= rhs[i] + tol for every index.
struct BoundPart {
  std::string name;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<bool> satisfied;
  // Flagged (not failed) when the rhs exceeds the initial squared residual,
  // i.e. the bound is true but says nothing.
  std::vector<bool> vacuous;
  bool all_satisfied = true;
  double max_violation = 0.0;  // max over i of lhs[i] - rhs[i]
  long first_violation = -1;
};

struct BoundReport {
  std::string name;
  bool applicable = true;  // false when the theorem's conditions fail
  std::string reason;      // why inapplicable
  std::vector<BoundPart> parts;
  double initial_distance = 0.0;  // ||z^0 - z*||
  double D_estimate = 0.0;        // sup_k ||z^k - z*||

  bool all_satisfied() const {
    for (const auto& p : parts) {
      if (!p.all_satisfied) return false;
    }
    return true;
  }
};

// Averaged-residual guarantee of inexact KM: for every prefix K,
//   (1/K) sum_{k<K} r_k^2 <= (||z0 - z*||^2 + sum_{k<K} eps_k) / (lambda(1-lambda)K),
//   eps_k = 2 lambda ||e^k|| ||z^k - z*|| + lambda^2 ||e^k||^2.
// Residual series must cover the iterates; recorded errors are required when
// the run was noisy (sigma0 > 0), otherwise missing errors count as zero.
BoundReport check_km_bound(const Trajectory& traj, const ResidualSeries& residuals,
                           const Point& z_star, double tol = 1e-9);

// Last-iterate guarantees: per-step near-monotonicity
//   r_k^2 <= r_{k-1}^2 + delta_{k-1},  delta_k = 4||e^k||(||z^{k+1}-z*|| + ||z^k-z*||),
// plus the full prefix bound
//   r_K^2 <= [averaged bound at K] + (1/K) sum_{k<K} sum_{j=k}^{K-1} delta_j.
// Prefixes where the rhs exceeds r_0^2 are marked vacuous (reported, not failed).
BoundReport check_last_iterate(const Trajectory& traj, const ResidualSeries& residuals,
                               const Point& z_star, double tol = 1e-9);

// Two-step lookahead-GDA rate: under lambda in (0, 1/2), gamma <= 1/L,
//   2 rho > -(1-2 lambda) gamma   and   2 rho >= 2 lambda gamma - (1 - gamma^2 L^2) gamma,
// verifies for every prefix K
//   (1/K) sum_{k<K} ||F(z^k - gamma F z^k)||^2 <= ||z0-z*||^2 / (lambda gamma ((1-2 lambda) gamma + 2 rho) K).
// Inapplicable (not failed) when the parameter conditions do not hold.
BoundReport check_la2_bound(const Trajectory& traj, const ProblemSpec& p, const Point& z_star,
                            double tol = 1e-9);

// CEG+ guarantees on a plain CEG+ trajectory (aux_iterates = half-step points):
//   fejer:    ||z^{k+1} - z*|| <= ||z^k - z*||,
//   residual: (1/K) sum ||z^k - z_bar^k||^2   <= D0^2 / (alpha (1 - gamma^2 L^2) K),
//   distance: (1/K) sum dist(0, S z_bar^k)^2  <= D0^2 / (alpha gamma^2 (1 + 2 rho/gamma - alpha) K),
// with dist(0, S z_bar^k) = ||H z^k - H z_bar^k|| / gamma. Parts whose
// conditions fail (gamma*L >= 1 for `residual`, alpha at its cap) are
// inapplicable rather than failed.
BoundReport check_cegplus_bounds(const Trajectory& traj, const ProblemSpec& p,
                                 const Point& z_star, double tol = 1e-9);

struct CocoercivityReport {
  bool satisfied = true;
  double min_margin = 0.0;  // min over pairs of lhs - rhs (>= -tol when satisfied)
  std::size_t pairs = 0;
};

// Samples pairs from the problem box and verifies the H = id - gamma*F
// inequality <Hz' - Hz, z' - z> >= 1/2 ||Hz'-Hz||^2 + 1/2 (1 - gamma^2 L^2) ||z'-z||^2.
// Requires L metadata and gamma <= 1/L.
CocoercivityReport check_h_cocoercivity(const ProblemSpec& p, double gamma, std::size_t samples,
                                        std::uint64_t seed, double tol = 1e-9);

struct SlopeFit {
  std::optional<double> slope;    // d log(r^2) / d log(k); empty if converged exactly
  bool converged_exactly = false; // some checkpoint had residual exactly 0
};

// Least-squares slope of log(values[k]^2) against log(k) at the given
// checkpoint iterations (each >= 1 and within the series).
SlopeFit slope_fit(const ResidualSeries& series, const std::vector<long>& checkpoints);

}  // namespace interp_solve
