#pragma once

#include "ucp/problems.hpp"
#include "ucp/solver.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ucp {

/// Everything a `solve` or `compare` run needs, as read from config file and flags.
struct RunConfig {
  std::string problem = "witsenhausen";
  WitsenhausenParams witsenhausen{};
  ZeroDelayParams zero_delay{};
  InventoryParams inventory{};
  QuadraticParams quadratic{};

  // Overrides applied to every stage, then per-stage overrides on top.
  std::optional<double> grid_a, grid_b;
  std::optional<std::size_t> grid_d;
  std::map<std::size_t, GridSpec> stage_grids;

  SolverConfig solver{};
  std::string mode = "adaptive";   // adaptive | fixed_split
  int n_local = 19;                // used by fixed_split
  std::filesystem::path output_dir = "ucp_out";

  /// Checks problem name, mode and solver fields; throws std::invalid_argument.
  void validate() const;
  SolverConfig solver_config() const;
};

std::unique_ptr<ProblemSpec> make_problem(const RunConfig& config);

/// One `controller_<m>.csv` per stage: header `y,u`, rows ascending in y, 17 significant digits.
std::vector<std::filesystem::path> export_controllers(const ControllerSet& controllers,
                                                      const std::filesystem::path& dir);

/// `report.json` with the summary and the per-round records.
std::filesystem::path write_report(const SolveResult& result, const RunConfig& config,
                                   const std::filesystem::path& dir);

/// `convergence.csv`: one row per round.
std::filesystem::path write_convergence_table(const SolveResult& result, const std::filesystem::path& dir);

struct ControllerTable {
  std::vector<double> y;
  std::vector<double> u;
};

ControllerTable read_controller_csv(const std::filesystem::path& path);

/// First round whose J is at or below `target`, if any.
std::optional<std::size_t> rounds_to_reach(const SolveResult& result, double target);

/// Error raised for unwritable or unreadable output paths.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ucp
