#include "dgplate/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dgplate/checkpoint.hpp"
#include "dgplate/output.hpp"

namespace dgplate {

namespace {

// Number of energy-increase warnings echoed to the log.
constexpr Index kMaxLoggedWarnings = 5;

std::string step_name(const std::string& prefix, Index step, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%08lld", prefix.c_str(), static_cast<long long>(step));
  return std::string(buf) + ext;
}

Checkpoint checkpoint_of(const DgSpace& space, const FlowState& state) {
  return {state.step, space.dofs().n_cells, space.dofs().n_basis, state.y};
}

}  // namespace

void configure_threads(const RunConfig& config) {
  const int n = config.deterministic ? 1 : config.threads;
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
  Eigen::setNbThreads(n);
}

void write_summary(const RunSummary& s, const std::filesystem::path& path) {
  nlohmann::json j;
  j["scenario"] = s.scenario;
  j["refinements"] = s.refinements;
  j["n_cells"] = s.n_cells;
  j["n_dofs"] = s.n_dofs;
  j["steps"] = s.steps;
  j["converged"] = s.converged;
  j["initial_energy"] = s.initial_energy;
  j["energy_total"] = s.energy_total;
  j["energy_no_constant"] = s.energy_no_constant;
  j["defect"] = s.defect;
  j["energy_increases"] = s.energy_increases;
  j["wall_seconds"] = s.wall_seconds;
  std::ofstream out(path);
  if (!out) throw OutputError("summary: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

RunSummary run(const RunConfig& config, std::ostream* log) {
  validate(config);
  const ScenarioSpec spec = resolve(config);
  configure_threads(config);
  const auto start = std::chrono::steady_clock::now();

  namespace fs = std::filesystem;
  const fs::path out(config.out);
  fs::create_directories(out / "snapshots");
  fs::create_directories(out / "checkpoints");
  {
    std::ofstream cfg(out / "config.txt");
    if (!cfg) throw OutputError("cannot write " + (out / "config.txt").string());
    cfg << serialize(config);
  }

  const Discretization disc(spec);
  const DgSpace& space = disc.space();
  const FlowProblem& problem = disc.problem();
  if (log) {
    *log << spec.name << ": refinements " << spec.refinements << ", " << disc.mesh().n_cells() << " cells, "
         << space.dofs().n_y() + space.dofs().n_lambda() << " dofs, tau " << spec.flow.tau << ", epsilon "
         << spec.penalty.epsilon << '\n';
  }

  const FlowOperators ops = prepare_operators(problem, spec.flow);
  FlowState state = initial_state(problem, ops, disc.initial_deformation());

  RunSummary summary;
  summary.scenario = spec.name;
  summary.refinements = spec.refinements;
  summary.n_cells = disc.mesh().n_cells();
  summary.n_dofs = space.dofs().n_y() + space.dofs().n_lambda();
  summary.initial_energy = state.energy.total;
  summary.defect = isometry_defect(space, state.y);
  write_vtk(space, state.y, out / "snapshots" / step_name("step", 0, ".vtk"));

  TraceWriter trace(out / "trace.csv", spec.flow.tau);
  StepDiagnostics last;
  bool have_last = false;
  bool last_written = false;

  const StepObserver observer = [&](const FlowState& s, const StepDiagnostics& d) {
    last = d;
    have_last = true;
    last_written = d.step % config.trace_every == 0;
    if (last_written) trace.write(d);
    const double slack = 1e-10 * std::abs(d.energy_before);
    if (d.energy_after > d.energy_before + slack) {
      ++summary.energy_increases;
      if (log && summary.energy_increases <= kMaxLoggedWarnings) {
        *log << "warning: step " << d.step << " raised the energy by " << d.energy_after - d.energy_before << '\n';
      }
    }
    if (d.step % config.snapshot_every == 0) write_vtk(space, s.y, out / "snapshots" / step_name("step", d.step, ".vtk"));
    if (d.step % config.checkpoint_every == 0) {
      write_checkpoint(checkpoint_of(space, s), out / "checkpoints" / step_name("step", d.step, ".ckpt"));
      trace.flush();
    }
    if (log && d.step % 1000 == 0) {
      *log << "step " << d.step << "  energy " << d.energy_after << "  change " << d.energy_after - d.energy_before
           << "  defect " << d.defect << "  cg " << d.cg_iterations << '\n';
    }
    return true;
  };

  FlowResult result;
  try {
    result = run_flow(std::move(state), problem, ops, spec.flow, observer);
  } catch (const std::exception& e) {
    trace.flush();
    throw RunError(spec.name + ": failed after step " + std::to_string(have_last ? last.step : 0) + ": " + e.what());
  }
  if (have_last && !last_written) trace.write(last);
  trace.flush();

  summary.steps = result.state.step;
  summary.converged = result.converged;
  summary.energy_total = result.state.energy.total;
  summary.energy_no_constant = result.state.energy.no_constant;
  if (have_last) summary.defect = last.defect;
  if (!have_last || last.step % config.snapshot_every != 0) {
    write_vtk(space, result.state.y, out / "snapshots" / step_name("step", result.state.step, ".vtk"));
  }
  write_checkpoint(checkpoint_of(space, result.state), out / "final.ckpt");
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_summary(summary, out / "summary.json");
  if (log) {
    *log << (summary.converged ? "converged" : "stopped without convergence") << " after " << summary.steps
         << " steps: energy " << summary.energy_total << " (without constant " << summary.energy_no_constant
         << "), defect " << summary.defect << ", " << summary.wall_seconds << " s\n";
  }
  return summary;
}

}  // namespace dgplate
