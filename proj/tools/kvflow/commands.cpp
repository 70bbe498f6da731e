#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kv/analysis.hpp"
#include "kv/errors.hpp"
#include "kv/problems.hpp"
#include "kv/stepper.hpp"
#include "selftest.hpp"

namespace kvflow {

namespace {

using nlohmann::json;

constexpr double kFitWindowBegin = 0.2;  // skips the initial transient
constexpr double kFitWindowEnd = 1.0;
constexpr int kForcingBoundSamples = 1000;

// 15 significant digits, C locale, no padding: reproducible diffs.
std::string num(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.15g", v);
  return buffer;
}

kv::FlowProblem make_problem(const RunConfig& config) {
  switch (config.example) {
    case 1: return kv::forced_polynomial_vortex(config.nu, config.kappa);
    case 2: return kv::decaying_polynomial_vortex();
    case 3: return kv::decaying_sine_vortex();
    default: throw kv::ConfigError("config: example must be 1, 2, or 3");
  }
}

double step_size(const RunConfig& config, int n) {
  return config.time.square_rule ? 1.0 / (static_cast<double>(n) * n) : config.time.k;
}

kv::TimeGrid make_grid(const RunConfig& config, int n, double T) {
  const double k = step_size(config, n);
  const double steps_real = T / k;
  const long long steps = std::llround(steps_real);
  if (steps < 1 || std::abs(steps - steps_real) > 1e-9 * std::max(1.0, steps_real))
    throw kv::ConfigError("config: the step size must divide T into whole steps");
  return kv::TimeGrid{T, static_cast<int>(steps)};
}

std::function<kv::Vec2(const kv::Vec2&, double)> forcing_of(const kv::FlowProblem& p) {
  return p.forcing ? p.forcing : nullptr;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kv::ConfigError("config: cannot write \"" + path.string() + "\"");
  out << content;
}

std::filesystem::path prepare_output_dir(const RunConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw kv::ConfigError("config: cannot create output_dir: " + ec.message());
  return dir;
}

json config_echo(const RunConfig& config) { return json::parse(emit_config(config)); }

std::string trace_csv(const kv::EnergyTrace& trace) {
  std::string csv = "t,norm_u,norm_grad_u,energy\n";
  for (std::size_t i = 0; i < trace.t.size(); ++i)
    csv += num(trace.t[i]) + "," + num(trace.norm_u[i]) + "," +
           num(trace.norm_grad_u[i]) + "," + num(trace.energy[i]) + "\n";
  return csv;
}

// Least-squares decay slope of the velocity norm over the fit window, or
// null when the trace does not reach into it.
json fit_report(const kv::EnergyTrace& trace) {
  int inside = 0;
  for (double t : trace.t) inside += (t >= kFitWindowBegin && t <= kFitWindowEnd);
  if (inside < 2) return nullptr;
  const auto fit =
      kv::fit_log_linear(trace.t, trace.norm_u, kFitWindowBegin, kFitWindowEnd);
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"points", fit.points},
          {"window", {kFitWindowBegin, kFitWindowEnd}}};
}

int single_level(const RunConfig& config, const char* command) {
  if (config.levels.size() != 1)
    throw kv::ConfigError(std::string("config: ") + command +
                          " uses exactly one mesh level");
  return config.levels.front();
}

// Trajectory plus the energy trace; shared by decay and boundedness. T = 0
// degenerates to the initial state alone.
kv::EnergyTrace run_trace(const RunConfig& config, const kv::FlowProblem& problem,
                          bool with_forcing, int n, double T) {
  const kv::ModelConfig model{config.nu, config.kappa};
  const kv::PicardConfig picard{config.picard_tol, config.picard_max};
  const auto mesh = kv::build_structured(n);
  const auto u0 = [&problem](const kv::Vec2& x) { return problem.velocity(x, 0.0); };

  if (T == 0.0) {
    kv::FlowSimulator sim(mesh, model, kv::TimeGrid{1.0, 1}, picard);
    const auto d = sim.diagnostics_for(sim.prepare_initial(u0));
    kv::EnergyTrace trace;
    trace.t = {0.0};
    trace.norm_u = {d.norm_u};
    trace.norm_grad_u = {d.norm_grad_u};
    trace.energy = {d.energy};
    return trace;
  }

  kv::FlowSimulator sim(mesh, model, make_grid(config, n, T), picard,
                        with_forcing ? forcing_of(problem) : nullptr);
  return kv::energy_trace(sim.run(u0));
}

}  // namespace

int cmd_convergence(const RunConfig& config) {
  validate(config);
  const double T = config.T.value_or(1.0);
  if (!(T > 0)) throw kv::ConfigError("config: convergence requires T > 0");
  const auto problem = make_problem(config);
  const kv::ModelConfig model{config.nu, config.kappa};
  const kv::PicardConfig picard{config.picard_tol, config.picard_max};

  std::vector<kv::ErrorNorms> norms;
  std::vector<double> hs;
  for (int n : config.levels) {
    const auto mesh = kv::build_structured(n);
    const auto layout = kv::make_dof_layout(mesh);
    const auto grid = make_grid(config, n, T);
    const auto u0 = [&](const kv::Vec2& x) { return problem.velocity(x, 0.0); };

    kv::FlowSimulator sim(mesh, model, grid, picard, forcing_of(problem));
    const auto run = sim.run(u0);

    if (problem.has_exact_solution) {
      norms.push_back(kv::error_norms(mesh, layout, run.final_state,
                                      kv::reference_from_exact(problem, T)));
    } else {
      // Reference policy for problems without closed forms: the same time
      // grid on a mesh refined twice more, evaluated by point location.
      const auto ref_mesh = kv::build_structured(4 * n);
      const auto ref_layout = kv::make_dof_layout(ref_mesh);
      kv::FlowSimulator ref_sim(ref_mesh, model, grid, picard, forcing_of(problem));
      const auto ref_run = ref_sim.run(u0);
      norms.push_back(kv::error_norms(
          mesh, layout, run.final_state,
          kv::reference_from_state(ref_mesh, ref_layout, ref_run.final_state)));
    }
    hs.push_back(1.0 / n);
  }

  std::vector<double> l2, h1, p;
  for (const auto& e : norms) {
    l2.push_back(e.velocity_l2);
    h1.push_back(e.velocity_h1);
    p.push_back(e.pressure_l2);
  }
  const auto l2_rates = kv::convergence_rates(l2);
  const auto h1_rates = kv::convergence_rates(h1);
  const auto p_rates = kv::convergence_rates(p);

  std::string csv = "h,l2_err,l2_rate,h1_err,h1_rate,p_err,p_rate\n";
  json rows = json::array();
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const bool first = i == 0;
    csv += num(hs[i]) + "," + num(l2[i]) + "," + (first ? "" : num(l2_rates[i - 1])) +
           "," + num(h1[i]) + "," + (first ? "" : num(h1_rates[i - 1])) + "," +
           num(p[i]) + "," + (first ? "" : num(p_rates[i - 1])) + "\n";
    json row{{"n", config.levels[i]},
             {"h", hs[i]},
             {"k", step_size(config, config.levels[i])},
             {"l2_err", l2[i]},
             {"h1_err", h1[i]},
             {"p_err", p[i]},
             {"l2_rate", first ? json(nullptr) : json(l2_rates[i - 1])},
             {"h1_rate", first ? json(nullptr) : json(h1_rates[i - 1])},
             {"p_rate", first ? json(nullptr) : json(p_rates[i - 1])}};
    rows.push_back(std::move(row));
  }

  const auto dir = prepare_output_dir(config);
  write_file(dir / "convergence.csv", csv);
  const json summary{
      {"command", "convergence"}, {"config", config_echo(config)}, {"T", T}, {"rows", rows}};
  write_file(dir / "convergence.json", summary.dump(2) + "\n");
  std::cout << "convergence: wrote " << (dir / "convergence.csv").string() << " and "
            << (dir / "convergence.json").string() << "\n";
  return 0;
}

int cmd_decay(const RunConfig& config) {
  validate(config);
  const int n = single_level(config, "decay");
  const double T = config.T.value_or(1.0);
  const auto problem = make_problem(config);

  // Free decay: the forcing is dropped regardless of the example.
  const auto trace = run_trace(config, problem, false, n, T);

  const auto dir = prepare_output_dir(config);
  write_file(dir / "decay.csv", trace_csv(trace));
  const json summary{{"command", "decay"},
                     {"config", config_echo(config)},
                     {"T", T},
                     {"n", n},
                     {"fit", fit_report(trace)}};
  write_file(dir / "decay.json", summary.dump(2) + "\n");
  std::cout << "decay: wrote " << (dir / "decay.csv").string() << " and "
            << (dir / "decay.json").string() << "\n";
  return 0;
}

int cmd_boundedness(const RunConfig& config) {
  validate(config);
  if (config.example != 1)
    throw kv::ConfigError("config: boundedness requires example 1 (bounded forcing)");
  const int n = single_level(config, "boundedness");
  const double T = config.T.value_or(10.0);
  if (!(T > 0)) throw kv::ConfigError("config: boundedness requires T > 0");
  const auto problem = make_problem(config);

  const auto trace = run_trace(config, problem, true, n, T);

  const auto mesh = kv::build_structured(n);
  const double lambda1 = kv::estimate_lambda1(mesh);
  const double f_bound =
      kv::forcing_bound(mesh, problem.forcing, T, kForcingBoundSamples);
  const double alpha_max =
      config.nu * lambda1 / (4.0 * (1.0 + config.kappa * lambda1));
  const double alpha = config.alpha.value_or(0.9 * alpha_max);
  const auto report = kv::absorbing_ball_diagnostic(
      trace, kv::ModelConfig{config.nu, config.kappa}, alpha, f_bound, lambda1);

  const auto dir = prepare_output_dir(config);
  write_file(dir / "boundedness.csv", trace_csv(trace));
  const json summary{
      {"command", "boundedness"},
      {"config", config_echo(config)},
      {"T", T},
      {"n", n},
      {"lambda1", lambda1},
      {"f_bound", f_bound},
      {"alpha", report.alpha},
      {"alpha_max", alpha_max},
      {"rho0", report.rho0},
      {"sup_energy_sqrt", report.sup_energy_sqrt},
      {"entry_index", report.entry_index},
      {"entry_time", report.entry_index >= 0 ? json(trace.t[report.entry_index])
                                             : json(nullptr)},
      {"permanent", report.permanent}};
  write_file(dir / "boundedness.json", summary.dump(2) + "\n");
  std::cout << "boundedness: wrote " << (dir / "boundedness.csv").string() << " and "
            << (dir / "boundedness.json").string() << "\n";
  return 0;
}

int cmd_selftest() { return run_selftest(std::cout) ? 0 : 4; }

namespace {

// Flag set shared by the experiment subcommands; mirrors RunConfig fields.
struct Flags {
  std::string config_path;
  int example = 0;
  double nu = 0, kappa = 0, T = 0, k = 0, picard_tol = 0, alpha = 0;
  int picard_max = 0;
  std::vector<int> levels;
  std::string time_rule;
  std::string output_dir;

  CLI::Option* o_config = nullptr;
  CLI::Option* o_example = nullptr;
  CLI::Option* o_nu = nullptr;
  CLI::Option* o_kappa = nullptr;
  CLI::Option* o_levels = nullptr;
  CLI::Option* o_T = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_rule = nullptr;
  CLI::Option* o_tol = nullptr;
  CLI::Option* o_max = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_out = nullptr;
};

void register_flags(CLI::App* cmd, Flags& f) {
  f.o_config = cmd->add_option("--config", f.config_path, "JSON configuration file");
  f.o_example = cmd->add_option("--example", f.example, "Flow problem: 1, 2, or 3");
  f.o_nu = cmd->add_option("--nu", f.nu, "Viscosity");
  f.o_kappa = cmd->add_option("--kappa", f.kappa, "Retardation parameter");
  f.o_levels =
      cmd->add_option("--levels", f.levels, "Mesh divisions, e.g. 4,8,16,32")
          ->delimiter(',');
  f.o_T = cmd->add_option("--T", f.T, "Final time");
  f.o_k = cmd->add_option("--k", f.k, "Explicit time step");
  f.o_rule = cmd->add_option("--time-rule", f.time_rule, "Step rule, only \"k=h^2\"");
  f.o_tol = cmd->add_option("--picard-tol", f.picard_tol, "Picard relative tolerance");
  f.o_max = cmd->add_option("--picard-max", f.picard_max, "Picard iteration cap");
  f.o_alpha = cmd->add_option("--alpha", f.alpha, "Absorbing-ball parameter");
  f.o_out = cmd->add_option("--output-dir", f.output_dir, "Report directory");
}

RunConfig assemble(const Flags& f) {
  RunConfig config;
  if (f.o_config->count()) config = load_config_file(f.config_path);
  if (f.o_example->count()) config.example = f.example;
  if (f.o_nu->count()) config.nu = f.nu;
  if (f.o_kappa->count()) config.kappa = f.kappa;
  if (f.o_levels->count()) config.levels = f.levels;
  if (f.o_T->count()) config.T = f.T;
  if (f.o_k->count() && f.o_rule->count())
    throw kv::ConfigError("config: give either --k or --time-rule, not both");
  if (f.o_k->count()) config.time = TimeRule{false, f.k};
  if (f.o_rule->count()) {
    if (f.time_rule != "k=h^2")
      throw kv::ConfigError("config: the only supported time rule is \"k=h^2\"");
    config.time = TimeRule{};
  }
  if (f.o_tol->count()) config.picard_tol = f.picard_tol;
  if (f.o_max->count()) config.picard_max = f.picard_max;
  if (f.o_alpha->count()) config.alpha = f.alpha;
  if (f.o_out->count()) config.output_dir = f.output_dir;
  validate(config);
  return config;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Finite element studies of a damped incompressible flow model"};
  app.require_subcommand(1);

  Flags conv_flags, decay_flags, bound_flags;
  auto* conv = app.add_subcommand(
      "convergence", "Mesh refinement study; errors and rates at the final time");
  register_flags(conv, conv_flags);
  auto* decay = app.add_subcommand(
      "decay", "Unforced run; energy trace and fitted decay slope");
  register_flags(decay, decay_flags);
  auto* bound = app.add_subcommand(
      "boundedness", "Long-horizon forced run; trace and absorbing-ball report");
  register_flags(bound, bound_flags);
  auto* self = app.add_subcommand(
      "selftest", "Checks assembly and solves against independent oracles");

  try {
    app.parse(argc, argv);
    if (conv->parsed()) return cmd_convergence(assemble(conv_flags));
    if (decay->parsed()) return cmd_decay(assemble(decay_flags));
    if (bound->parsed()) return cmd_boundedness(assemble(bound_flags));
    if (self->parsed()) return cmd_selftest();
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const kv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const kv::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace kvflow
