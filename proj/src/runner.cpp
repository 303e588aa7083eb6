#include "interp_solve/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace interp_solve {
namespace {

using nlohmann::json;

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw ParameterError(key + ": trailing characters in '" + value + "'");
    return v;
  } catch (const ParameterError&) {
    throw;
  } catch (const std::exception&) {
    throw ParameterError(key + ": cannot parse number '" + value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw ParameterError(key + ": trailing characters in '" + value + "'");
    return v;
  } catch (const ParameterError&) {
    throw;
  } catch (const std::exception&) {
    throw ParameterError(key + ": cannot parse integer '" + value + "'");
  }
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

BatchMode batch_mode_from_string(const std::string& s) {
  if (s == "fixed") return BatchMode::Fixed;
  if (s == "best") return BatchMode::BestIterate;
  if (s == "last") return BatchMode::LastIterate;
  throw ParameterError("unknown batch mode: " + s + " (want fixed|best|last)");
}

std::string batch_mode_name(BatchMode m) {
  switch (m) {
    case BatchMode::Fixed: return "fixed";
    case BatchMode::BestIterate: return "best";
    case BatchMode::LastIterate: return "last";
  }
  return "unknown";
}

// CSV field quoting for the sweep summary (labels may carry commas).
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

bool wants_check(const RunConfig& cfg, const std::string& name) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
}

json part_summary(const BoundPart& part) {
  json j;
  j["name"] = part.name;
  j["count"] = part.lhs.size();
  j["all_satisfied"] = part.all_satisfied;
  j["max_violation"] = part.max_violation;
  j["first_violation"] = part.first_violation;
  std::size_t vacuous = 0;
  for (bool v : part.vacuous) {
    if (v) ++vacuous;
  }
  j["vacuous_count"] = vacuous;
  if (!part.lhs.empty()) {
    j["final_lhs"] = part.lhs.back();
    j["final_rhs"] = part.rhs.back();
  }
  return j;
}

}  // namespace

double RunResult::best_residual() const {
  if (residuals.values.empty()) return 0.0;
  return *std::min_element(residuals.values.begin(), residuals.values.end());
}

ProblemSpec build_problem(const RunConfig& cfg) {
  if (cfg.problem == "quadratic") {
    const bool direct = cfg.a || cfg.b;
    const bool inverse = cfg.L || cfg.rho;
    if (direct && inverse) {
      throw ParameterError("quadratic: give either (a, b) or (L, rho), not both");
    }
    if (inverse) {
      if (!cfg.L || !cfg.rho) throw ParameterError("quadratic: (L, rho) must be given together");
      return quadratic_from_constants(*cfg.L, *cfg.rho);
    }
    return quadratic_field(cfg.a.value_or(1.0), cfg.b.value_or(0.0));
  }
  if (cfg.problem == "polar") {
    if (cfg.b || cfg.L || cfg.rho) throw ParameterError("polar: only the constant a is tunable");
    return polar_game_field(cfg.a.value_or(1.0 / 3.0));
  }
  if (cfg.problem == "forsaken" || cfg.problem == "lne-forsaken") {
    if (cfg.b || cfg.L || cfg.rho) throw ParameterError(cfg.problem + ": only the constant a is tunable");
    const double fallback = cfg.problem == "forsaken" ? 0.45 : 0.34;
    ProblemSpec p = forsaken_field(cfg.a.value_or(fallback));
    if (cfg.problem == "lne-forsaken") p.name = "lne-forsaken";
    return p;
  }
  throw ParameterError("unknown problem: " + cfg.problem +
                       " (want quadratic|polar|forsaken|lne-forsaken)");
}

Point resolve_z0(const std::string& spec, const ProblemSpec& problem) {
  if (spec == "default") {
    if (problem.name == "quadratic" || problem.name == "linear") {
      Point z(problem.dim(), 0.0);
      z[0] = 1.0;
      return z;
    }
    if (problem.name == "polar") return {1.0, 0.3};
    if (problem.name == "forsaken" || problem.name == "lne-forsaken") return {0.5, 0.5};
    throw ParameterError("no default start point for problem " + problem.name);
  }
  Point z;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) z.push_back(parse_double("z0", item));
  if (z.size() != problem.dim()) {
    throw ParameterError("z0 has " + std::to_string(z.size()) + " components, problem needs " +
                         std::to_string(problem.dim()));
  }
  return z;
}

RunResult run_experiment(const RunConfig& cfg) {
  RunResult result;
  result.problem = build_problem(cfg);
  const ProblemSpec& p = result.problem;

  SolverParams params = cfg.params;
  if (cfg.gamma_auto) {
    if (!p.field.lipschitz) throw ParameterError("--gamma auto needs a problem with known L");
    params.gamma = (wants_check(cfg, "cegplus") ? 0.9 : 1.0) / *p.field.lipschitz;
  }
  if (cfg.tau_mode != "fixed") {
    if (!p.field.lipschitz) throw ParameterError("tau auto scheduling needs a problem with known L");
    const double gl = params.gamma * *p.field.lipschitz;
    if (cfg.tau_mode == "auto-best") {
      params.tau = tau_schedule(params.iterations, gl, TauMode::Best);
    } else if (cfg.tau_mode == "auto-last") {
      params.tau = tau_schedule(params.iterations, gl, TauMode::Last);
    } else {
      throw ParameterError("unknown tau mode: " + cfg.tau_mode + " (want fixed|auto-best|auto-last)");
    }
  }
  params.batch_mode = batch_mode_from_string(cfg.batch_mode);

  const ResidualKind kind = cfg.residual_kind == "auto" ? default_residual_kind(p)
                                                        : residual_kind_from_string(cfg.residual_kind);
  const double gamma_for_residual = params.gamma;  // frozen before the solver mutates nothing
  if (params.target_residual) {
    const ProblemSpec p_copy = p;
    const long tau_ref = cfg.tau_ref;
    params.stop_residual_fn = [p_copy, gamma_for_residual, kind, tau_ref](const Point& z) {
      return residual(p_copy, z, gamma_for_residual, kind, tau_ref);
    };
  }

  const Point z0 = resolve_z0(cfg.z0, p);

  try {
    if (cfg.solver == "gda") {
      result.trajectory = iterate_run(p, PlainMethod::Gda, params, z0);
    } else if (cfg.solver == "eg") {
      result.trajectory = iterate_run(p, PlainMethod::Eg, params, z0);
    } else if (cfg.solver == "egplus") {
      result.trajectory = iterate_run(p, PlainMethod::EgPlus, params, z0);
    } else if (cfg.solver == "cegplus") {
      result.trajectory = iterate_run(p, PlainMethod::CegPlus, params, z0);
    } else if (cfg.solver == "fbf") {
      result.trajectory = iterate_run(p, PlainMethod::Fbf, params, z0);
    } else if (cfg.solver == "km-exact") {
      result.trajectory = km_exact_run(p, params, z0);
    } else if (cfg.solver == "relaxed-pp") {
      result.trajectory = relaxed_pp_run(p, params, z0, cfg.inner_tol);
    } else if (cfg.solver == "rapp") {
      result.trajectory = rapp_run(p, params, z0);
    } else if (cfg.solver == "la-gda") {
      result.trajectory = lookahead_run(p, LookaheadBase::Gda, params, z0);
    } else if (cfg.solver == "la-eg") {
      result.trajectory = lookahead_run(p, LookaheadBase::Eg, params, z0);
    } else if (cfg.solver == "la-cegplus") {
      result.trajectory = lookahead_run(p, LookaheadBase::CegPlus, params, z0);
    } else {
      throw ParameterError("unknown solver: " + cfg.solver);
    }
  } catch (const DivergenceError& e) {
    result.trajectory = e.partial;
    result.diverged = true;
    result.divergence_message = e.what();
  } catch (const ConvergenceError& e) {
    result.trajectory = e.partial;
    result.diverged = true;
    result.divergence_message = e.what();
  }

  result.residuals = residual_series(p, result.trajectory, gamma_for_residual, kind, cfg.tau_ref);
  if (p.known_zero) {
    result.dist_to_zero.reserve(result.trajectory.iterates.size());
    for (const auto& z : result.trajectory.iterates) {
      result.dist_to_zero.push_back(dist(z, *p.known_zero));
    }
  }

  for (const auto& check : cfg.checks) {
    if (check == "hcoco") {
      const CocoercivityReport rep =
          check_h_cocoercivity(p, params.gamma, 200, params.seed);
      BoundReport br;
      br.name = "hcoco";
      BoundPart part;
      part.name = "pairwise-margin";
      part.lhs = {-rep.min_margin};
      part.rhs = {0.0};
      part.all_satisfied = rep.satisfied;
      part.satisfied = {rep.satisfied};
      part.max_violation = -rep.min_margin;
      part.first_violation = rep.satisfied ? -1 : 0;
      br.parts.push_back(std::move(part));
      result.reports.push_back(std::move(br));
      continue;
    }
    if (!p.known_zero) {
      throw DiagnosticsError("check '" + check + "' needs a problem with a known zero");
    }
    if (check == "km") {
      result.reports.push_back(check_km_bound(result.trajectory, result.residuals, *p.known_zero));
    } else if (check == "last") {
      result.reports.push_back(
          check_last_iterate(result.trajectory, result.residuals, *p.known_zero));
    } else if (check == "la2") {
      result.reports.push_back(check_la2_bound(result.trajectory, p, *p.known_zero));
    } else if (check == "cegplus") {
      result.reports.push_back(check_cegplus_bounds(result.trajectory, p, *p.known_zero));
    } else {
      throw ParameterError("unknown check: " + check + " (want km|last|la2|cegplus|hcoco)");
    }
  }
  return result;
}

void write_trajectory_csv(const std::string& path, const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const std::size_t d = result.trajectory.dim();
  out << "iter,oracle_calls,residual,dist_to_zero";
  for (std::size_t j = 0; j < d; ++j) out << ",z_" << j;
  out << "\n";
  for (std::size_t i = 0; i < result.trajectory.iterates.size(); ++i) {
    out << i << ',' << result.trajectory.oracle_calls[i] << ','
        << format_g17(result.residuals.values[i]) << ',';
    if (result.dist_to_zero.empty()) {
      out << "nan";
    } else {
      out << format_g17(result.dist_to_zero[i]);
    }
    for (std::size_t j = 0; j < d; ++j) out << ',' << format_g17(result.trajectory.iterates[i][j]);
    out << "\n";
  }
  if (!out) throw IoError("write failed for " + path);
}

void write_report_json(const std::string& path, const RunConfig& cfg, const RunResult& result) {
  json j;
  j["label"] = cfg.label.empty() ? cfg.solver + " on " + result.problem.name : cfg.label;

  json jp;
  jp["name"] = result.problem.name;
  jp["dim"] = result.problem.dim();
  jp["constrained"] = result.problem.constrained();
  jp["constants"] = result.problem.constants;
  if (!result.problem.annotation.empty()) jp["annotation"] = result.problem.annotation;
  if (result.problem.known_zero) jp["known_zero"] = *result.problem.known_zero;
  j["problem"] = jp;

  const SolverParams& sp = result.trajectory.params;
  json js;
  js["name"] = cfg.solver;
  js["gamma"] = sp.gamma;
  js["lambda"] = sp.lambda;
  js["alpha"] = sp.alpha;
  js["tau"] = sp.tau;
  js["iterations"] = sp.iterations;
  js["sigma0"] = sp.sigma0;
  js["batch_mode"] = batch_mode_name(sp.batch_mode);
  js["batch_n"] = sp.batch_n;
  js["seed"] = sp.seed;
  js["strict"] = sp.strict;
  if (sp.target_residual) js["target_residual"] = *sp.target_residual;
  if (sp.max_oracle_calls) js["max_oracle_calls"] = *sp.max_oracle_calls;
  j["solver"] = js;

  json jr;
  jr["stop_reason"] = to_string(result.trajectory.stop_reason);
  jr["steps"] = result.trajectory.steps();
  jr["oracle_calls"] = result.trajectory.oracle_calls.empty() ? 0 : result.trajectory.oracle_calls.back();
  jr["warnings"] = result.trajectory.warnings;
  jr["diverged"] = result.diverged;
  if (result.diverged) jr["divergence_message"] = result.divergence_message;
  jr["errors_are_estimates"] = result.trajectory.errors_are_estimates;
  j["run"] = jr;

  json jres;
  jres["kind"] = to_string(result.residuals.kind);
  jres["gamma"] = result.residuals.gamma;
  jres["estimate"] = result.residuals.estimate;
  if (!result.residuals.values.empty()) {
    jres["initial"] = result.residuals.values.front();
    jres["final"] = result.final_residual();
    jres["best"] = result.best_residual();
  }
  j["residual"] = jres;

  if (!result.dist_to_zero.empty()) {
    json jd;
    jd["initial"] = result.dist_to_zero.front();
    jd["final"] = result.dist_to_zero.back();
    j["dist_to_zero"] = jd;
  }

  // Decay slope of the residual curve at quartile checkpoints.
  const long K = result.trajectory.steps();
  if (K >= 2) {
    std::vector<long> checkpoints;
    for (long k : {K / 4, K / 2, 3 * K / 4, K}) {
      k = std::max<long>(1, k);
      if (checkpoints.empty() || checkpoints.back() != k) checkpoints.push_back(k);
    }
    if (checkpoints.size() >= 2) {
      const SlopeFit fit = slope_fit(result.residuals, checkpoints);
      json jf;
      jf["checkpoints"] = checkpoints;
      jf["converged_exactly"] = fit.converged_exactly;
      if (fit.slope) jf["slope"] = *fit.slope;
      j["slope_fit"] = jf;
    }
  }

  json bounds = json::array();
  for (const auto& rep : result.reports) {
    json jb;
    jb["name"] = rep.name;
    jb["applicable"] = rep.applicable;
    if (!rep.reason.empty()) jb["reason"] = rep.reason;
    jb["all_satisfied"] = rep.all_satisfied();
    jb["initial_distance"] = rep.initial_distance;
    jb["D_estimate"] = rep.D_estimate;
    json parts = json::array();
    for (const auto& part : rep.parts) parts.push_back(part_summary(part));
    jb["parts"] = parts;
    bounds.push_back(jb);
  }
  j["bounds"] = bounds;

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path);
}

namespace {

// Applies one sweep setting (CLI syntax) onto a config.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "gamma") {
    if (value == "auto") {
      cfg.gamma_auto = true;
    } else {
      cfg.gamma_auto = false;
      cfg.params.gamma = parse_double(key, value);
    }
  } else if (key == "lambda") {
    cfg.params.lambda = parse_double(key, value);
  } else if (key == "alpha") {
    cfg.params.alpha = parse_double(key, value);
  } else if (key == "tau") {
    cfg.params.tau = parse_long(key, value);
  } else if (key == "iterations") {
    cfg.params.iterations = parse_long(key, value);
  } else if (key == "sigma0") {
    cfg.params.sigma0 = parse_double(key, value);
  } else if (key == "batch-n") {
    cfg.params.batch_n = static_cast<std::uint64_t>(parse_long(key, value));
  } else if (key == "seed") {
    cfg.params.seed = static_cast<std::uint64_t>(parse_long(key, value));
  } else if (key == "target-residual") {
    cfg.params.target_residual = parse_double(key, value);
  } else if (key == "max-oracle-calls") {
    cfg.params.max_oracle_calls = static_cast<std::uint64_t>(parse_long(key, value));
  } else if (key == "strict") {
    if (value == "on" || value == "true" || value == "1") cfg.params.strict = true;
    else if (value == "off" || value == "false" || value == "0") cfg.params.strict = false;
    else throw ParameterError("strict: want on|off");
  } else if (key == "solver") {
    cfg.solver = value;
  } else if (key == "problem") {
    cfg.problem = value;
  } else if (key == "z0") {
    cfg.z0 = value;
  } else if (key == "a") {
    cfg.a = parse_double(key, value);
  } else if (key == "b") {
    cfg.b = parse_double(key, value);
  } else if (key == "L") {
    cfg.L = parse_double(key, value);
  } else if (key == "rho") {
    cfg.rho = parse_double(key, value);
  } else if (key == "batch-mode") {
    cfg.batch_mode = value;
  } else if (key == "tau-mode") {
    cfg.tau_mode = value;
  } else if (key == "residual") {
    cfg.residual_kind = value;
  } else {
    throw ParameterError("unknown sweep key: " + key);
  }
}

}  // namespace

namespace {

struct SweepCell {
  RunConfig cfg;
  std::string settings;
};

// Shared executor: runs every cell, writes run_<n>.{csv,json} plus
// summary.csv, and returns rows in cell order regardless of thread schedule.
std::vector<SweepRow> run_cells(std::vector<SweepCell> cells, const std::string& out_dir,
                                int jobs) {
  std::filesystem::create_directories(out_dir);
  const std::size_t total = cells.size();
  for (std::size_t n = 0; n < total; ++n) {
    char tag[32];
    std::snprintf(tag, sizeof(tag), "run_%03zu", n);
    cells[n].cfg.output = out_dir + "/" + tag;
    if (cells[n].cfg.label.empty()) cells[n].cfg.label = cells[n].settings;
  }

  std::vector<SweepRow> rows(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t n = next.fetch_add(1);
      if (n >= total) return;
      const SweepCell& cell = cells[n];
      SweepRow row;
      row.index = n;
      row.label = cell.cfg.label;
      row.settings = cell.settings;
      try {
        const RunResult result = run_experiment(cell.cfg);
        row.csv_path = cell.cfg.output + ".csv";
        row.json_path = cell.cfg.output + ".json";
        write_trajectory_csv(row.csv_path, result);
        write_report_json(row.json_path, cell.cfg, result);
        row.final_residual = result.final_residual();
        row.best_residual = result.best_residual();
        row.oracle_calls = result.trajectory.oracle_calls.empty()
                               ? 0
                               : result.trajectory.oracle_calls.back();
        for (const auto& rep : result.reports) {
          if (!row.bounds.empty()) row.bounds += ';';
          row.bounds += rep.name;
          row.bounds += rep.applicable ? (rep.all_satisfied() ? "=pass" : "=fail") : "=n/a";
        }
        if (result.diverged) {
          row.status = "diverged";
          row.detail = result.divergence_message;
        } else {
          row.status = "ok";
          row.detail = to_string(result.trajectory.stop_reason);
        }
      } catch (const Error& e) {
        row.status = "error";
        row.detail = e.what();
      }
      rows[n] = std::move(row);
    }
  };

  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const std::string summary_path = out_dir + "/summary.csv";
  std::ofstream out(summary_path);
  if (!out) throw IoError("cannot write " + summary_path);
  out << "index,label,settings,status,detail,final_residual,best_residual,oracle_calls,bounds,csv,json\n";
  for (const auto& row : rows) {
    out << row.index << ',' << csv_escape(row.label) << ',' << csv_escape(row.settings) << ','
        << row.status << ',' << csv_escape(row.detail) << ',' << format_g17(row.final_residual)
        << ',' << format_g17(row.best_residual) << ',' << row.oracle_calls << ','
        << csv_escape(row.bounds) << ',' << csv_escape(row.csv_path) << ','
        << csv_escape(row.json_path) << "\n";
  }
  if (!out) throw IoError("write failed for " + summary_path);
  return rows;
}

}  // namespace

std::vector<SweepRow> run_sweep(const RunConfig& base, const std::vector<SweepAxis>& axes,
                                const std::string& out_dir, int jobs) {
  if (axes.empty()) throw ParameterError("sweep needs at least one axis");
  for (const auto& axis : axes) {
    if (axis.values.empty()) throw ParameterError("sweep axis " + axis.key + " has no values");
  }
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis.values.size();

  // Materialize the grid in deterministic order (last axis fastest).
  std::vector<SweepCell> cells;
  cells.reserve(total);
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    SweepCell cell;
    cell.cfg = base;
    std::string settings;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const std::string& v = axes[a].values[idx[a]];
      apply_setting(cell.cfg, axes[a].key, v);
      if (!settings.empty()) settings += ';';
      settings += axes[a].key + "=" + v;
    }
    cell.settings = settings;
    cells.push_back(std::move(cell));
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
    }
  }
  return run_cells(std::move(cells), out_dir, jobs);
}

std::vector<SweepRow> run_sweep(const std::vector<RunConfig>& runs, const std::string& out_dir,
                                int jobs) {
  if (runs.empty()) throw ParameterError("sweep needs at least one run");
  std::vector<SweepCell> cells;
  cells.reserve(runs.size());
  for (const auto& cfg : runs) {
    SweepCell cell;
    cell.cfg = cfg;
    cell.settings = cfg.label;
    cells.push_back(std::move(cell));
  }
  return run_cells(std::move(cells), out_dir, jobs);
}

std::vector<RunConfig> preset_runs(const std::string& preset) {
  std::vector<RunConfig> runs;
  if (preset == "fig-forsaken") {
    // Four ways through the forsaken game from the shared default start.
    RunConfig base;
    base.problem = "forsaken";
    base.residual_kind = "stepnorm";
    base.params.iterations = 300;
    {
      RunConfig c = base;
      c.solver = "la-gda";
      c.gamma_auto = true;
      c.params.tau = 20;
      c.params.lambda = 0.2;
      c.label = "la-gda tau=20";
      runs.push_back(c);
    }
    {
      RunConfig c = base;
      c.solver = "la-cegplus";
      c.gamma_auto = true;
      c.params.tau = 20;
      c.params.lambda = 0.2;
      c.params.alpha = 0.1;
      c.label = "la-cegplus tau=20";
      runs.push_back(c);
    }
    const ProblemSpec p = build_problem(base);
    const double L = p.field.lipschitz.value();
    {
      RunConfig c = base;
      c.solver = "rapp";
      c.params.gamma = 4.0 / L;
      c.params.tau = 10;
      c.params.lambda = 0.2;
      c.params.strict = false;
      c.label = "rapp gamma=4/L tau=10";
      runs.push_back(c);
    }
    {
      RunConfig c = base;
      c.solver = "rapp";
      c.params.gamma = 4.0 / L;
      c.params.tau = 10;
      c.params.lambda = 1.0;
      c.params.strict = false;
      c.label = "app gamma=4/L tau=10";
      runs.push_back(c);
    }
    return runs;
  }
  if (preset == "fig-la") {
    // Lookahead family on the polar game and on a nonmonotone quadratic.
    const std::vector<std::pair<std::string, std::string>> problems = {
        {"polar", "polar"}, {"quadratic", "quadratic rho=-1/3"}};
    for (const auto& [prob, prob_label] : problems) {
      RunConfig base;
      base.problem = prob;
      if (prob == "quadratic") {
        base.L = 1.0;
        base.rho = -1.0 / 3.0;
      }
      base.gamma_auto = true;
      base.params.iterations = 300;
      base.params.lambda = 0.1;
      base.params.alpha = 0.1;
      struct Variant {
        std::string solver;
        long tau;
      };
      const std::vector<Variant> variants = {
          {"la-gda", 2}, {"la-gda", 10}, {"la-eg", 10}, {"la-cegplus", 10}};
      for (const auto& v : variants) {
        RunConfig c = base;
        c.solver = v.solver;
        c.params.tau = v.tau;
        c.label = prob_label + " " + v.solver + " tau=" + std::to_string(v.tau);
        runs.push_back(c);
      }
    }
    return runs;
  }
  throw ParameterError("unknown preset: " + preset + " (want fig-forsaken|fig-la)");
}

std::string aggregate_reports(const std::vector<std::string>& json_paths) {
  json out;
  out["runs"] = json_paths.size();
  std::size_t diverged = 0;
  std::map<std::string, std::map<std::string, std::size_t>> bounds;
  for (const auto& path : json_paths) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    try {
      if (j.at("run").at("diverged").get<bool>()) ++diverged;
      for (const auto& jb : j.at("bounds")) {
        const std::string name = jb.at("name").get<std::string>();
        auto& tally = bounds[name];
        if (!jb.at("applicable").get<bool>()) {
          ++tally["inapplicable"];
        } else if (jb.at("all_satisfied").get<bool>()) {
          ++tally["pass"];
        } else {
          ++tally["fail"];
        }
      }
    } catch (const json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  out["diverged"] = diverged;
  json jb;
  for (const auto& [name, tally] : bounds) {
    json t;
    t["pass"] = tally.count("pass") ? tally.at("pass") : 0;
    t["fail"] = tally.count("fail") ? tally.at("fail") : 0;
    t["inapplicable"] = tally.count("inapplicable") ? tally.at("inapplicable") : 0;
    jb[name] = t;
  }
  out["bounds"] = jb;
  return out.dump(2);
}

}  // namespace interp_solve
