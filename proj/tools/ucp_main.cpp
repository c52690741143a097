// ucp: command-line front end for the marginal-cost control solver.
//
//   ucp solve   --problem witsenhausen --d 2000 --output-dir out/
//   ucp compare --problem witsenhausen --d 1000 --target-J 0.2
//   ucp pin     --output tests/fixtures/pinned.json
//
// Options may also come from a key = value file given with --config; flags win.

#include "ucp/oracle.hpp"
#include "ucp/parallel.hpp"
#include "ucp/run.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericError = 2;

struct Cli {
  ucp::RunConfig run;
  std::string gamma = "piecewise_linear";
  std::vector<std::string> stage_grid;
  std::optional<double> radius, newton_cap;
  std::optional<double> target_J;
  std::filesystem::path pin_output = "pinned.json";
  bool quiet = false;
};

ucp::GridSpec parse_stage_grid(const std::string& text, std::size_t& stage) {
  // stage:a:b:d
  std::vector<std::string> parts;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ':')) parts.push_back(field);
  if (parts.size() != 4) throw std::invalid_argument("stage_grid: expected m:a:b:d, got '" + text + "'");
  try {
    stage = std::stoul(parts[0]);
    return {std::stod(parts[1]), std::stod(parts[2]), std::stoul(parts[3])};
  } catch (const std::exception&) {
    throw std::invalid_argument("stage_grid: cannot parse '" + text + "'");
  }
}

void finalize(Cli& cli) {
  auto& inv = cli.run.inventory;
  if (cli.gamma == "quadratic")
    inv.gamma.kind = ucp::StageCostShape::Kind::quadratic;
  else if (cli.gamma == "piecewise_linear")
    inv.gamma.kind = ucp::StageCostShape::Kind::piecewise_linear;
  else
    throw std::invalid_argument("inventory.gamma: must be quadratic or piecewise_linear");
  for (const auto& s : cli.stage_grid) {
    std::size_t m = 0;
    const auto g = parse_stage_grid(s, m);
    cli.run.stage_grids[m] = g;
  }
  cli.run.solver.radius = cli.radius;
  cli.run.solver.newton_cap = cli.newton_cap;
  cli.run.validate();
}

void add_run_options(CLI::App& app, Cli& cli) {
  auto& r = cli.run;
  auto& s = r.solver;
  app.add_option("--problem", r.problem, "witsenhausen | zero_delay | inventory | quadratic")->capture_default_str();
  app.add_option("--k", r.witsenhausen.k, "Witsenhausen control-cost weight")->capture_default_str();
  app.add_option("--sigma", r.witsenhausen.sigma, "Witsenhausen initial-state std dev")->capture_default_str();
  app.add_option("--lambda", r.zero_delay.lambda, "zero-delay power weight")->capture_default_str();
  app.add_option("--stages", r.inventory.stages, "inventory horizon M")->capture_default_str();
  app.add_option("--xi", r.inventory.xi, "inventory per-unit order cost")->capture_default_str();
  app.add_option("--gamma", cli.gamma, "inventory stage cost: quadratic | piecewise_linear")->capture_default_str();
  app.add_option("--holding", r.inventory.gamma.holding, "piecewise-linear slope above 0")->capture_default_str();
  app.add_option("--shortage", r.inventory.gamma.shortage, "piecewise-linear slope below 0")->capture_default_str();
  app.add_option("--a-track", r.quadratic.a_track, "quadratic problem target slope")->capture_default_str();
  app.add_option("--a", r.grid_a, "grid lower bound for every stage");
  app.add_option("--b", r.grid_b, "grid upper bound for every stage");
  app.add_option("--d", r.grid_d, "grid size for every stage");
  app.add_option("--stage-grid", cli.stage_grid, "per-stage grid m:a:b:d (repeatable)");
  app.add_option("--N", s.iterations_per_round, "iterations per round")->capture_default_str();
  app.add_option("--p", s.precision, "precision for termination")->capture_default_str();
  app.add_option("--tau", s.step_size, "gradient step size")->capture_default_str();
  app.add_option("--r", cli.radius, "partial-exhaustion radius (default (b-a)/100)");
  app.add_option("--h0", s.fd_step, "finite-difference base step")->capture_default_str();
  app.add_option("--curvature-floor", s.curvature_floor, "Newton curvature threshold")->capture_default_str();
  app.add_option("--newton-cap", cli.newton_cap, "max Newton step (default (b-a)/10)");
  app.add_option("--backtracks", s.backtracks, "step halvings when a local step raises the marginal cost (negative disables)")->capture_default_str();
  app.add_option("--max-rounds", s.max_rounds, "round limit")->capture_default_str();
  app.add_option("--workers", s.workers, "worker threads")->capture_default_str();
  app.add_option("--mode", r.mode, "adaptive | fixed_split")->capture_default_str();
  app.add_option("--n-local", r.n_local, "local-update iterations per round in fixed_split")->capture_default_str();
  app.add_option("--output-dir", r.output_dir, "output directory")->capture_default_str();
  app.add_flag("--quiet", cli.quiet, "no per-round progress");
}

ucp::SolveResult run_and_write(const ucp::RunConfig& config, bool quiet) {
  const auto problem = ucp::make_problem(config);
  ucp::RoundObserver progress;
  if (!quiet)
    progress = [](const ucp::RoundReport& r, const ucp::ControllerSet&) {
      std::fprintf(stderr, "round %4zu  J=%.9f  I_L=%.3e  I_P=%.3e  N_L=%2d N_P=%2d  %.0f ms\n", r.round, r.J, r.I_L,
                   r.I_P, r.N_L, r.N_P, r.wall_ms);
    };
  auto result = ucp::solve(*problem, config.solver_config(), std::nullopt, progress);
  ucp::export_controllers(result.controllers, config.output_dir);
  ucp::write_report(result, config, config.output_dir);
  ucp::write_convergence_table(result, config.output_dir);
  std::printf("%s: final J = %.9f after %zu rounds (%s), %.1f s -> %s\n", config.problem.c_str(), result.final_J,
              result.rounds.size(), ucp::to_string(result.termination).c_str(), result.wall_ms / 1000.0,
              config.output_dir.string().c_str());
  return result;
}

int cmd_compare(const Cli& cli) {
  ucp::RunConfig adaptive = cli.run;
  adaptive.mode = "adaptive";
  adaptive.output_dir = cli.run.output_dir / "adaptive";
  ucp::RunConfig fixed = cli.run;
  fixed.mode = "fixed_split";
  fixed.output_dir = cli.run.output_dir / "fixed_split";

  const auto a = run_and_write(adaptive, cli.quiet);
  const auto f = run_and_write(fixed, cli.quiet);

  nlohmann::json summary = {{"adaptive", {{"final_J", a.final_J}, {"rounds", a.rounds.size()}, {"wall_ms", a.wall_ms}}},
                            {"fixed_split",
                             {{"n_local", cli.run.n_local},
                              {"final_J", f.final_J},
                              {"rounds", f.rounds.size()},
                              {"wall_ms", f.wall_ms}}}};
  if (cli.target_J) {
    auto to_json = [](std::optional<std::size_t> r) { return r ? nlohmann::json(*r) : nlohmann::json(nullptr); };
    summary["target_J"] = *cli.target_J;
    summary["adaptive"]["rounds_to_target"] = to_json(ucp::rounds_to_reach(a, *cli.target_J));
    summary["fixed_split"]["rounds_to_target"] = to_json(ucp::rounds_to_reach(f, *cli.target_J));
  }
  std::ofstream out(cli.run.output_dir / "comparison.json");
  if (!out) throw ucp::IoError("cannot write " + (cli.run.output_dir / "comparison.json").string());
  out << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

int cmd_pin(const Cli& cli) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& v : ucp::compute_pinned_values()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.value);
    std::printf("%-44s %s   (%s)\n", v.name.c_str(), buf, v.method.c_str());
    values.push_back({{"name", v.name}, {"value", v.value}, {"method", v.method}});
  }
  if (cli.pin_output.has_parent_path()) std::filesystem::create_directories(cli.pin_output.parent_path());
  std::ofstream out(cli.pin_output);
  if (!out) throw ucp::IoError("cannot write " + cli.pin_output.string());
  out << values.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  cli.run.solver.workers = ucp::default_workers();

  CLI::App app{"Pointwise marginal-cost solver for integral-objective control problems"};
  app.set_config("--config", "", "key = value configuration file");
  app.require_subcommand(1);
  app.fallthrough();
  add_run_options(app, cli);

  auto* solve_cmd = app.add_subcommand("solve", "run one solve and write controllers and reports");
  auto* compare_cmd = app.add_subcommand("compare", "run adaptive and fixed_split on the same problem");
  compare_cmd->add_option("--target-J", cli.target_J, "report rounds needed to reach this J");
  auto* pin_cmd = app.add_subcommand("pin", "compute oracle regression values and write them to a fixtures file");
  pin_cmd->add_option("--output", cli.pin_output, "fixtures file")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    finalize(cli);
    if (*solve_cmd) {
      run_and_write(cli.run, cli.quiet);
      return kOk;
    }
    if (*compare_cmd) return cmd_compare(cli);
    if (*pin_cmd) return cmd_pin(cli);
  } catch (const ucp::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ucp::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
