#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "interp_solve/diagnostics.hpp"
#include "interp_solve/problems.hpp"
#include "interp_solve/solvers.hpp"

namespace interp_solve {

// Everything one experiment needs, mirroring the CLI flags one-to-one.
struct RunConfig {
  std::string problem = "quadratic";  // quadratic | polar | forsaken | lne-forsaken
  // Optional problem constants: a, b (direct) or L, rho (inverse form).
  std::optional<double> a, b, L, rho;

  std::string solver = "eg";  // gda|eg|egplus|cegplus|fbf|km-exact|relaxed-pp|rapp|la-gda|la-eg|la-cegplus
  SolverParams params;
  bool gamma_auto = false;          // --gamma auto -> 1/L (0.9/L if cegplus bound requested)
  std::string tau_mode = "fixed";   // fixed | auto-best | auto-last
  std::string batch_mode = "fixed"; // fixed | best | last
  std::string z0 = "default";       // "x,y" literal or named preset
  std::string residual_kind = "auto";
  long tau_ref = 32;                // EstimatedResolvent reference horizon
  double inner_tol = 1e-10;         // relaxed-pp inner tolerance
  std::vector<std::string> checks;  // subset of {km, last, la2, cegplus, hcoco}
  std::string output;               // path prefix -> <output>.csv, <output>.json
  std::string label;                // row label in sweep summaries
};

struct RunResult {
  ProblemSpec problem;
  Trajectory trajectory;
  ResidualSeries residuals;
  std::vector<double> dist_to_zero;  // aligned with iterates; empty if no known zero
  std::vector<BoundReport> reports;
  bool diverged = false;
  std::string divergence_message;

  double final_residual() const { return residuals.values.empty() ? 0.0 : residuals.values.back(); }
  double best_residual() const;
};

// Resolves the named problem + overrides. Throws ParameterError on unknown
// names or invalid constants.
ProblemSpec build_problem(const RunConfig& cfg);

// "default" start points: quadratic (1,0); polar (1,0.3); forsaken (0.5,0.5).
Point resolve_z0(const std::string& spec, const ProblemSpec& problem);

// Executes one configured run: builds the problem, resolves gamma/tau/z0,
// dispatches the solver, computes the residual series and the requested bound
// checks. A divergence aborts the iteration but still yields the partial
// trajectory with `diverged` set.
RunResult run_experiment(const RunConfig& cfg);

// CSV row per iterate: iter,oracle_calls,residual,dist_to_zero,z_0,...,z_{d-1}
// (floats with 17 significant digits, so rewriting is byte-identical).
void write_trajectory_csv(const std::string& path, const RunResult& result);

// JSON report: problem constants, solver parameters, stop reason, warnings,
// residual summary, and one entry per bound check (pass/fail + margins).
void write_report_json(const std::string& path, const RunConfig& cfg, const RunResult& result);

// One grid axis of a sweep: parameter name -> values (kept in CLI syntax).
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

struct SweepRow {
  std::size_t index = 0;
  std::string label;
  std::string settings;  // "k=v;k=v" for the varied axes
  std::string status;    // ok | diverged | error
  std::string detail;    // stop reason or error text
  double final_residual = 0.0;
  double best_residual = 0.0;
  std::uint64_t oracle_calls = 0;
  std::string bounds;  // "name=pass|fail|n/a" per requested check
  std::string csv_path;
  std::string json_path;
};

// Runs the Cartesian grid (axes in order, last axis fastest) over the base
// config with `jobs` worker threads; writes per-run outputs plus summary.csv
// into out_dir. Row order is the deterministic grid order regardless of jobs.
std::vector<SweepRow> run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
                                const std::string& out_dir, int jobs);

// Same machinery over an explicit list of configs (figure presets).
std::vector<SweepRow> run_sweep(const std::vector<RunConfig>& runs, const std::string& out_dir,
                                int jobs);

// Expands a named figure preset into concrete run configs (base must name no
// conflicting options; presets pin problem/solver/parameters).
std::vector<RunConfig> preset_runs(const std::string& preset);

// Aggregates run reports into {"bounds": {name: {"pass": n, "fail": m}}, ...}.
// Throws ParseError naming the offending file on malformed input.
std::string aggregate_reports(const std::vector<std::string>& json_paths);

}  // namespace interp_solve
