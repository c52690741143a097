#include "ucp/run.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ucp {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void RunConfig::validate() const {
  if (problem != "witsenhausen" && problem != "zero_delay" && problem != "inventory" && problem != "quadratic")
    throw std::invalid_argument("problem: unknown problem '" + problem + "'");
  if (mode != "adaptive" && mode != "fixed_split")
    throw std::invalid_argument("mode: must be adaptive or fixed_split, got '" + mode + "'");
  solver_config().validate();
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig cfg = solver;
  cfg.fixed_local = mode == "fixed_split" ? std::optional<int>(n_local) : std::nullopt;
  return cfg;
}

std::unique_ptr<ProblemSpec> make_problem(const RunConfig& config) {
  config.validate();
  auto apply = [&](std::vector<GridSpec> grids) {
    for (std::size_t m = 0; m < grids.size(); ++m) {
      if (config.grid_a) grids[m].a = *config.grid_a;
      if (config.grid_b) grids[m].b = *config.grid_b;
      if (config.grid_d) grids[m].d = *config.grid_d;
      if (auto it = config.stage_grids.find(m); it != config.stage_grids.end()) grids[m] = it->second;
    }
    for (const auto& [m, g] : config.stage_grids)
      if (m >= grids.size()) throw std::invalid_argument("stage_grid: stage " + std::to_string(m) + " does not exist");
    return grids;
  };
  if (config.problem == "witsenhausen")
    return std::make_unique<Witsenhausen>(config.witsenhausen, apply(Witsenhausen::default_grids()));
  if (config.problem == "zero_delay")
    return std::make_unique<ZeroDelay>(config.zero_delay, apply(ZeroDelay::default_grids()));
  if (config.problem == "inventory")
    return std::make_unique<Inventory>(config.inventory, apply(Inventory::default_grids(config.inventory.stages)));
  return std::make_unique<QuadraticSynthetic>(config.quadratic, apply(QuadraticSynthetic::default_grids()));
}

std::vector<std::filesystem::path> export_controllers(const ControllerSet& controllers,
                                                      const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  for (std::size_t m = 0; m < controllers.size(); ++m) {
    const auto path = dir / ("controller_" + std::to_string(m) + ".csv");
    auto out = open_for_write(path);
    out << "y,u\n";
    const auto& c = controllers[m];
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      out << format_double(c.grid.point(i)) << ',' << format_double(c[i]) << '\n';
    finish(out, path);
    paths.push_back(path);
  }
  return paths;
}

std::filesystem::path write_report(const SolveResult& result, const RunConfig& config,
                                   const std::filesystem::path& dir) {
  using nlohmann::json;
  json rounds = json::array();
  for (const auto& r : result.rounds)
    rounds.push_back({{"round", r.round},
                      {"J", r.J},
                      {"J_local", r.J_local},
                      {"I_L", r.I_L},
                      {"I_P", r.I_P},
                      {"N_L", r.N_L},
                      {"N_P", r.N_P},
                      {"wall_ms", r.wall_ms}});
  const SolverConfig cfg = config.solver_config();
  json report = {{"problem", config.problem},
                 {"mode", config.mode},
                 {"N", cfg.iterations_per_round},
                 {"p", cfg.precision},
                 {"workers", cfg.workers},
                 {"initial_J", result.initial_J},
                 {"final_J", result.final_J},
                 {"termination", to_string(result.termination)},
                 {"total_rounds", result.rounds.size()},
                 {"wall_ms", result.wall_ms},
                 {"rounds", rounds}};
  const auto path = dir / "report.json";
  auto out = open_for_write(path);
  out << report.dump(2) << '\n';
  finish(out, path);
  return path;
}

std::filesystem::path write_convergence_table(const SolveResult& result, const std::filesystem::path& dir) {
  const auto path = dir / "convergence.csv";
  auto out = open_for_write(path);
  out << "round,J,J_local,I_L,I_P,N_L,N_P,wall_ms\n";
  for (const auto& r : result.rounds)
    out << r.round << ',' << format_double(r.J) << ',' << format_double(r.J_local) << ',' << format_double(r.I_L)
        << ',' << format_double(r.I_P) << ',' << r.N_L << ',' << r.N_P << ',' << format_double(r.wall_ms) << '\n';
  finish(out, path);
  return path;
}

ControllerTable read_controller_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "y,u") throw IoError(path.string() + ": expected header 'y,u'");
  ControllerTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError(path.string() + ": malformed row '" + line + "'");
    t.y.push_back(std::strtod(line.substr(0, comma).c_str(), nullptr));
    t.u.push_back(std::strtod(line.substr(comma + 1).c_str(), nullptr));
  }
  return t;
}

std::optional<std::size_t> rounds_to_reach(const SolveResult& result, double target) {
  for (const auto& r : result.rounds)
    if (r.J <= target) return r.round;
  return std::nullopt;
}

}  // namespace ucp
