// interp-solve: experiment CLI for the inclusion 0 in Az + Fz.
//
// Subcommands: run (single experiment), sweep (parameter grids and figure
// presets), report (aggregate bound reports). Exit codes: 0 success,
// 1 validation/IO/parse error, 2 divergence detected (partial output written).

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "interp_solve/runner.hpp"

namespace is = interp_solve;

namespace {

double cli_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw is::ParameterError(key + ": trailing characters in '" + value + "'");
    return v;
  } catch (const is::ParameterError&) {
    throw;
  } catch (const std::exception&) {
    throw is::ParameterError(key + ": cannot parse number '" + value + "'");
  }
}

long cli_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw is::ParameterError(key + ": trailing characters in '" + value + "'");
    return v;
  } catch (const is::ParameterError&) {
    throw;
  } catch (const std::exception&) {
    throw is::ParameterError(key + ": cannot parse integer '" + value + "'");
  }
}

std::uint64_t cli_u64(const std::string& key, const std::string& value) {
  // stoull silently wraps negative inputs, so reject them up front.
  if (!value.empty() && value[0] == '-') {
    throw is::ParameterError(key + ": expected a nonnegative integer, got '" + value + "'");
  }
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw is::ParameterError(key + ": trailing characters in '" + value + "'");
    return static_cast<std::uint64_t>(v);
  } catch (const is::ParameterError&) {
    throw;
  } catch (const std::exception&) {
    throw is::ParameterError(key + ": cannot parse integer '" + value + "'");
  }
}

bool cli_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw is::ParameterError(key + ": cannot parse boolean '" + value + "' (want true|false)");
}

// Shortest decimal form that parses back to the same double, so emitted
// configs reproduce runs bit for bit.
std::string fmt_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// Flags shared by `run` and `sweep`, mirroring RunConfig one-to-one. --gamma
// and --tau are strings so they can carry the `auto` spellings.
struct CliOptions {
  std::string problem = "quadratic";
  double a = 0.0, b = 0.0, L = 0.0, rho = 0.0;
  std::string solver = "eg";
  std::string gamma = "0.5";
  double lambda = 0.5;
  double alpha = 0.5;
  std::string tau = "1";
  long iterations = 100;
  double sigma0 = 0.0;
  std::string batch_mode = "fixed";
  std::uint64_t batch_n = 1;
  std::uint64_t seed = 0;
  bool strict = true;
  double target = 0.0;
  std::uint64_t max_oracle_calls = 0;
  std::string z0 = "default";
  std::string residual_kind = "auto";
  long tau_ref = 32;
  double inner_tol = 1e-10;
  std::vector<std::string> checks;
  std::string label;
  std::string config_path;
  std::set<std::string> provided;  // keys set explicitly, via flag or config file

  bool was(const std::string& key) const { return provided.count(key) > 0; }
};

// Keys understood in config files and emitted by --print-config, in emission
// order. "K" also accepts the alias "iterations".
constexpr const char* kConfigKeys[] = {
    "problem", "a",      "b",          "L",       "rho",    "solver", "gamma",  "lambda",
    "alpha",   "tau",    "K",          "sigma0",  "batch-mode", "batch-n", "seed", "strict",
    "target",  "max-oracle-calls",     "z0",      "residual", "tau-ref", "inner-tol",
    "check",   "label"};

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// key=value lines; blank lines, full-line comments (# or ;), and [section]
// headers are skipped. A value wrapped in double quotes is unwrapped.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw is::IoError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[' && text.back() == ']') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw is::ParseError(path + ":" + std::to_string(lineno) + ": expected key=value, got '" +
                           text + "'");
    }
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

void apply_config_value(CliOptions& o, const std::string& key, const std::string& value) {
  if (key == "problem") {
    o.problem = value;
  } else if (key == "a") {
    o.a = cli_double(key, value);
  } else if (key == "b") {
    o.b = cli_double(key, value);
  } else if (key == "L") {
    o.L = cli_double(key, value);
  } else if (key == "rho") {
    o.rho = cli_double(key, value);
  } else if (key == "solver") {
    o.solver = value;
  } else if (key == "gamma") {
    o.gamma = value;
  } else if (key == "lambda") {
    o.lambda = cli_double(key, value);
  } else if (key == "alpha") {
    o.alpha = cli_double(key, value);
  } else if (key == "tau") {
    o.tau = value;
  } else if (key == "K") {
    o.iterations = cli_long(key, value);
  } else if (key == "sigma0") {
    o.sigma0 = cli_double(key, value);
  } else if (key == "batch-mode") {
    o.batch_mode = value;
  } else if (key == "batch-n") {
    o.batch_n = cli_u64(key, value);
  } else if (key == "seed") {
    o.seed = cli_u64(key, value);
  } else if (key == "strict") {
    o.strict = cli_bool(key, value);
  } else if (key == "target") {
    o.target = cli_double(key, value);
  } else if (key == "max-oracle-calls") {
    o.max_oracle_calls = cli_u64(key, value);
  } else if (key == "z0") {
    o.z0 = value;
  } else if (key == "residual") {
    o.residual_kind = value;
  } else if (key == "tau-ref") {
    o.tau_ref = cli_long(key, value);
  } else if (key == "inner-tol") {
    o.inner_tol = cli_double(key, value);
  } else if (key == "check") {
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto comma = value.find(',', start);
      const std::string item = comma == std::string::npos ? value.substr(start)
                                                          : value.substr(start, comma - start);
      if (!trim(item).empty()) o.checks.push_back(trim(item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } else if (key == "label") {
    o.label = value;
  } else {
    throw is::ParameterError("config: unknown key '" + key + "'");
  }
}

// Fill in anything the command line did not set from the config file (flags
// always win), and record which keys were set explicitly either way.
void finalize_options(CLI::App* sub, CliOptions& o) {
  for (const char* key : kConfigKeys) {
    if (sub->count(std::string("--") + key) > 0) o.provided.insert(key);
  }
  if (o.config_path.empty()) return;
  const std::set<std::string> from_cli = o.provided;
  for (const auto& [raw_key, value] : read_config_file(o.config_path)) {
    const std::string key = raw_key == "iterations" ? "K" : raw_key;
    if (from_cli.count(key) > 0) continue;  // command-line flag overrides the file
    apply_config_value(o, key, value);
    o.provided.insert(key);
  }
}

// Effective configuration as a config file; reading it back reproduces the
// run exactly. Unset optional keys are omitted rather than written empty.
std::string config_to_ini(const CliOptions& o) {
  std::ostringstream out;
  out << "problem=" << o.problem << "\n";
  if (o.was("a")) out << "a=" << fmt_double(o.a) << "\n";
  if (o.was("b")) out << "b=" << fmt_double(o.b) << "\n";
  if (o.was("L")) out << "L=" << fmt_double(o.L) << "\n";
  if (o.was("rho")) out << "rho=" << fmt_double(o.rho) << "\n";
  out << "solver=" << o.solver << "\n";
  out << "gamma=" << o.gamma << "\n";
  out << "lambda=" << fmt_double(o.lambda) << "\n";
  out << "alpha=" << fmt_double(o.alpha) << "\n";
  out << "tau=" << o.tau << "\n";
  out << "K=" << o.iterations << "\n";
  out << "sigma0=" << fmt_double(o.sigma0) << "\n";
  out << "batch-mode=" << o.batch_mode << "\n";
  out << "batch-n=" << o.batch_n << "\n";
  out << "seed=" << o.seed << "\n";
  out << "strict=" << (o.strict ? "true" : "false") << "\n";
  if (o.was("target")) out << "target=" << fmt_double(o.target) << "\n";
  if (o.was("max-oracle-calls")) out << "max-oracle-calls=" << o.max_oracle_calls << "\n";
  out << "z0=" << o.z0 << "\n";
  out << "residual=" << o.residual_kind << "\n";
  out << "tau-ref=" << o.tau_ref << "\n";
  out << "inner-tol=" << fmt_double(o.inner_tol) << "\n";
  for (const auto& c : o.checks) out << "check=" << c << "\n";
  if (!o.label.empty()) out << "label=" << o.label << "\n";
  return out.str();
}

void add_run_options(CLI::App* sub, CliOptions& o) {
  sub->add_option("--problem", o.problem, "problem: quadratic|polar|forsaken|lne-forsaken")
      ->capture_default_str();
  sub->add_option("--a", o.a, "problem constant a");
  sub->add_option("--b", o.b, "problem constant b (quadratic)");
  sub->add_option("--L", o.L, "target Lipschitz constant (quadratic inverse form)");
  sub->add_option("--rho", o.rho, "target comonotonicity constant (quadratic inverse form)");
  sub->add_option("--solver", o.solver,
                  "gda|eg|egplus|cegplus|fbf|km-exact|relaxed-pp|rapp|la-gda|la-eg|la-cegplus")
      ->capture_default_str();
  sub->add_option("--gamma", o.gamma, "step size, or 'auto' for 1/L")->capture_default_str();
  sub->add_option("--lambda", o.lambda, "relaxation weight")->capture_default_str();
  sub->add_option("--alpha", o.alpha, "CEG+ multiplier")->capture_default_str();
  sub->add_option("--tau", o.tau, "inner horizon, or auto-best|auto-last")->capture_default_str();
  sub->add_option("--K,--iterations", o.iterations, "outer iteration count")
      ->capture_default_str();
  sub->add_option("--sigma0", o.sigma0, "oracle noise level")->capture_default_str();
  sub->add_option("--batch-mode", o.batch_mode, "minibatch schedule: fixed|best|last")
      ->capture_default_str();
  sub->add_option("--batch-n", o.batch_n, "fixed minibatch size")->capture_default_str();
  sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  sub->add_flag("--strict,!--no-strict", o.strict,
                "enforce theory parameter ranges (off: warn and run anyway)")
      ->capture_default_str();
  sub->add_option("--target", o.target, "stop once the residual falls below this");
  sub->add_option("--max-oracle-calls", o.max_oracle_calls, "oracle call budget");
  sub->add_option("--z0", o.z0, "start point 'x,y' or 'default'")->capture_default_str();
  sub->add_option("--residual", o.residual_kind, "auto|exact|estimated|opnorm|stepnorm")
      ->capture_default_str();
  sub->add_option("--tau-ref", o.tau_ref, "inner steps of the estimated-resolvent residual")
      ->capture_default_str();
  sub->add_option("--inner-tol", o.inner_tol, "relaxed-pp inner stopping tolerance")
      ->capture_default_str();
  sub->add_option("--check", o.checks, "bound checks to run: km|last|la2|cegplus|hcoco");
  sub->add_option("--label", o.label, "label echoed into reports");
  sub->add_option("--config", o.config_path,
                  "key=value config file; command-line flags override it");
}

is::RunConfig make_config(const CliOptions& o) {
  is::RunConfig cfg;
  cfg.problem = o.problem;
  if (o.was("a")) cfg.a = o.a;
  if (o.was("b")) cfg.b = o.b;
  if (o.was("L")) cfg.L = o.L;
  if (o.was("rho")) cfg.rho = o.rho;
  cfg.solver = o.solver;
  if (o.gamma == "auto") {
    cfg.gamma_auto = true;
  } else {
    cfg.params.gamma = cli_double("gamma", o.gamma);
  }
  if (o.tau == "auto-best" || o.tau == "auto-last") {
    cfg.tau_mode = o.tau;
  } else {
    cfg.params.tau = cli_long("tau", o.tau);
  }
  cfg.params.lambda = o.lambda;
  cfg.params.alpha = o.alpha;
  cfg.params.iterations = o.iterations;
  cfg.params.sigma0 = o.sigma0;
  cfg.batch_mode = o.batch_mode;
  cfg.params.batch_n = o.batch_n;
  cfg.params.seed = o.seed;
  cfg.params.strict = o.strict;
  if (o.was("target")) cfg.params.target_residual = o.target;
  if (o.was("max-oracle-calls")) cfg.params.max_oracle_calls = o.max_oracle_calls;
  cfg.z0 = o.z0;
  cfg.residual_kind = o.residual_kind;
  cfg.tau_ref = o.tau_ref;
  cfg.inner_tol = o.inner_tol;
  cfg.checks = o.checks;
  cfg.label = o.label;
  return cfg;
}

// The output contract promises an IO failure before any computation, so probe
// writability without clobbering whatever is already there.
void preflight_writable(const std::string& path) {
  std::ofstream probe(path, std::ios::app);
  if (!probe) throw is::IoError("cannot write " + path);
}

int default_jobs() {
  if (const char* env = std::getenv("INTERP_SOLVE_JOBS")) {
    try {
      const int j = std::stoi(env);
      if (j >= 1) return j;
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  return 1;
}

int do_run(CLI::App* sub, CliOptions& o, const std::string& output, bool print_config) {
  finalize_options(sub, o);
  if (print_config) {
    std::cout << config_to_ini(o);
    return 0;
  }
  is::RunConfig cfg = make_config(o);
  cfg.output = output;
  if (!cfg.output.empty()) {
    preflight_writable(cfg.output + ".csv");
    preflight_writable(cfg.output + ".json");
  }
  const is::RunResult result = is::run_experiment(cfg);
  if (!cfg.output.empty()) {
    is::write_trajectory_csv(cfg.output + ".csv", result);
    is::write_report_json(cfg.output + ".json", cfg, result);
  }

  std::cout << cfg.solver << " on " << result.problem.name << ": " << result.trajectory.steps()
            << " steps, stop=" << is::to_string(result.trajectory.stop_reason)
            << ", residual(" << is::to_string(result.residuals.kind)
            << ")=" << result.final_residual() << "\n";
  for (const auto& w : result.trajectory.warnings) std::cout << "warning: " << w << "\n";
  for (const auto& rep : result.reports) {
    std::cout << "bound " << rep.name << ": ";
    if (!rep.applicable) {
      std::cout << "inapplicable (" << rep.reason << ")";
    } else if (rep.all_satisfied()) {
      std::cout << "pass";
    } else {
      std::cout << "FAIL";
    }
    std::cout << "\n";
  }
  if (result.diverged) {
    std::cerr << "diverged: " << result.divergence_message << "\n";
    return 2;
  }
  return 0;
}

int do_sweep(CLI::App* sub, CliOptions& o, const std::vector<std::string>& axis_specs,
             const std::string& preset, const std::string& out_dir, int jobs) {
  finalize_options(sub, o);
  std::vector<is::SweepRow> rows;
  if (!preset.empty()) {
    if (!axis_specs.empty()) throw is::ParameterError("give either --preset or --axis, not both");
    rows = is::run_sweep(is::preset_runs(preset), out_dir, jobs);
  } else {
    std::vector<is::SweepAxis> axes;
    for (const auto& spec : axis_specs) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw is::ParameterError("axis must look like key=v1,v2,... (got '" + spec + "')");
      }
      is::SweepAxis axis;
      axis.key = spec.substr(0, eq);
      std::string rest = spec.substr(eq + 1);
      std::size_t start = 0;
      while (start <= rest.size()) {
        const auto comma = rest.find(',', start);
        const std::string item =
            comma == std::string::npos ? rest.substr(start) : rest.substr(start, comma - start);
        if (item.empty()) throw is::ParameterError("axis " + axis.key + " has an empty value");
        axis.values.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      axes.push_back(std::move(axis));
    }
    rows = is::run_sweep(make_config(o), axes, out_dir, jobs);
  }

  bool any_completed = false;
  for (const auto& row : rows) {
    std::cout << "[" << row.index << "] " << row.label << ": " << row.status;
    if (!row.detail.empty()) std::cout << " (" << row.detail << ")";
    if (row.status != "error") std::cout << " residual=" << row.final_residual;
    std::cout << "\n";
    if (row.status != "error") any_completed = true;
  }
  std::cout << "summary: " << out_dir << "/summary.csv\n";
  return any_completed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solvers and diagnostics for structured inclusions 0 in Az + Fz"};
  app.set_version_flag("--version", "interp-solve 0.1.0");
  app.require_subcommand(1);

  CliOptions run_opts;
  std::string run_output;
  bool print_config = false;
  CLI::App* run_sub = app.add_subcommand("run", "run one configured experiment");
  add_run_options(run_sub, run_opts);
  run_sub->add_option("--output,-o", run_output, "path prefix for <prefix>.csv and <prefix>.json");
  run_sub->add_flag("--print-config", print_config,
                    "print the effective configuration and exit");

  CliOptions sweep_opts;
  std::vector<std::string> axis_specs;
  std::string preset;
  std::string out_dir;
  int jobs = default_jobs();
  CLI::App* sweep_sub = app.add_subcommand("sweep", "run a parameter grid or a figure preset");
  add_run_options(sweep_sub, sweep_opts);
  sweep_sub->add_option("--axis", axis_specs, "grid axis key=v1,v2,... (repeatable)");
  sweep_sub->add_option("--preset", preset, "figure preset: fig-forsaken|fig-la");
  sweep_sub->add_option("--out", out_dir, "output directory")->required();
  sweep_sub->add_option("--jobs", jobs, "worker threads (default: $INTERP_SOLVE_JOBS or 1)")
      ->capture_default_str();

  std::vector<std::string> report_paths;
  CLI::App* report_sub = app.add_subcommand("report", "aggregate run reports to stdout JSON");
  report_sub->add_option("paths", report_paths, "run report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(run_sub)) return do_run(run_sub, run_opts, run_output, print_config);
    if (app.got_subcommand(sweep_sub)) {
      return do_sweep(sweep_sub, sweep_opts, axis_specs, preset, out_dir, jobs);
    }
    if (app.got_subcommand(report_sub)) {
      std::cout << is::aggregate_reports(report_paths) << "\n";
      return 0;
    }
  } catch (const is::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
