#ifndef DGPLATE_DRIVER_HPP
#define DGPLATE_DRIVER_HPP

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "dgplate/config.hpp"

namespace dgplate {

/// Solver failure annotated with the scenario and the last completed step.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSummary {
  std::string scenario;
  int refinements = 0;
  Index n_cells = 0;
  Index n_dofs = 0;  // deformation plus multiplier unknowns
  Index steps = 0;
  bool converged = false;
  double initial_energy = 0.0;
  double energy_total = 0.0;        // with 0.5 int |Z|^2
  double energy_no_constant = 0.0;  // E_h^1
  double defect = 0.0;
  Index energy_increases = 0;  // steps where the energy rose beyond round-off
  double wall_seconds = 0.0;
};

/// Runs a scenario end to end and writes into `config.out`:
/// trace.csv, summary.json, config.txt, snapshots/*.vtk, checkpoints/*.ckpt
/// and final.ckpt. Progress goes to `log` if given.
RunSummary run(const RunConfig& config, std::ostream* log = nullptr);

void write_summary(const RunSummary& summary, const std::filesystem::path& path);

/// Applies `threads` (1 if deterministic) to OpenMP and Eigen.
void configure_threads(const RunConfig& config);

}  // namespace dgplate

#endif  // DGPLATE_DRIVER_HPP
