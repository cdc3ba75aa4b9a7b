#include "dgplate/cli.hpp"

#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

#include "dgplate/checkpoint.hpp"
#include "dgplate/driver.hpp"

namespace dgplate {

namespace {

struct Flags {
  std::string config_file;
  std::string scenario;
  int refinements = 0;
  double tau = 0.0, gamma0 = 0.0, gamma1 = 0.0, epsilon = 0.0, tol = 0.0, cg_tol = 0.0;
  Index max_steps = 0, snapshot_every = 0, checkpoint_every = 0, trace_every = 0;
  int cg_max_iters = 0, threads = 0;
  std::string out;
  bool deterministic = false, literal_phi_zero = false, plain_cg = false;
};

struct Bound {
  CLI::Option* config = nullptr;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;
};

Bound add_flags(CLI::App& cmd, Flags& f) {
  Bound b;
  b.config = cmd.add_option("--config", f.config_file, "key = value configuration file");
  const auto opt = [&](const std::string& name, auto& target, const std::string& help, auto apply) {
    b.setters.emplace_back(cmd.add_option(name, target, help), apply);
  };
  opt("--scenario", f.scenario, "scenario name", [&f](RunConfig& c) { c.scenario = f.scenario; });
  opt("--refinements", f.refinements, "uniform refinements", [&f](RunConfig& c) { c.refinements = f.refinements; });
  opt("--tau", f.tau, "pseudo-time step", [&f](RunConfig& c) { c.tau = f.tau; });
  opt("--gamma0", f.gamma0, "value jump penalty", [&f](RunConfig& c) { c.gamma0 = f.gamma0; });
  opt("--gamma1", f.gamma1, "gradient jump penalty", [&f](RunConfig& c) { c.gamma1 = f.gamma1; });
  opt("--epsilon", f.epsilon, "zero-order weight of the flow metric", [&f](RunConfig& c) { c.epsilon = f.epsilon; });
  opt("--tol", f.tol, "stopping threshold on the energy change", [&f](RunConfig& c) { c.tol = f.tol; });
  opt("--max-steps", f.max_steps, "step limit", [&f](RunConfig& c) { c.max_steps = f.max_steps; });
  opt("--cg-tol", f.cg_tol, "relative Schur CG tolerance", [&f](RunConfig& c) { c.cg_tol = f.cg_tol; });
  opt("--cg-max-iters", f.cg_max_iters, "Schur CG iteration limit",
      [&f](RunConfig& c) { c.cg_max_iters = f.cg_max_iters; });
  opt("--snapshot-every", f.snapshot_every, "steps between VTK snapshots",
      [&f](RunConfig& c) { c.snapshot_every = f.snapshot_every; });
  opt("--checkpoint-every", f.checkpoint_every, "steps between checkpoints",
      [&f](RunConfig& c) { c.checkpoint_every = f.checkpoint_every; });
  opt("--trace-every", f.trace_every, "steps between CSV rows", [&f](RunConfig& c) { c.trace_every = f.trace_every; });
  opt("--out", f.out, "output directory", [&f](RunConfig& c) { c.out = f.out; });
  opt("--threads", f.threads, "worker threads", [&f](RunConfig& c) { c.threads = f.threads; });
  b.setters.emplace_back(cmd.add_flag("--deterministic", f.deterministic, "single-threaded, bitwise reproducible"),
                         [&f](RunConfig& c) { c.deterministic = f.deterministic; });
  b.setters.emplace_back(cmd.add_flag("--literal-phi-zero", f.literal_phi_zero, "clamp with Phi = 0"),
                         [&f](RunConfig& c) { c.literal_phi_zero = f.literal_phi_zero; });
  b.setters.emplace_back(cmd.add_flag("--plain-cg", f.plain_cg, "disable the Schur preconditioner"),
                         [&f](RunConfig& c) { c.precondition = !f.plain_cg; });
  return b;
}

RunConfig collect(const Bound& b, const Flags& f) {
  RunConfig c;
  if (b.config->count() > 0) c = parse_config_file(f.config_file, c);
  for (const auto& [option, apply] : b.setters) {
    if (option->count() > 0) apply(c);
  }
  return c;
}

std::string valid_flags(const CLI::App& cmd) {
  std::string s;
  for (const CLI::Option* o : cmd.get_options()) {
    if (o->get_name().rfind("--", 0) == 0) s += (s.empty() ? "" : ", ") + o->get_name();
  }
  return s;
}

}  // namespace

Command parse_command_line(const std::vector<std::string>& args) {
  CLI::App app{"dG gradient flow for bilayer plates", "dgplate"};
  app.require_subcommand(0, 1);
  Flags run_flags, energy_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run a scenario to equilibrium");
  const Bound run_bound = add_flags(*run_cmd, run_flags);
  CLI::App* list_cmd = app.add_subcommand("list-scenarios", "list the built-in scenarios");
  CLI::App* energy_cmd = app.add_subcommand("energy", "evaluate the energy of a checkpoint");
  std::string checkpoint;
  energy_cmd->add_option("checkpoint", checkpoint, "checkpoint file")->required();
  const Bound energy_bound = add_flags(*energy_cmd, energy_flags);

  std::vector<const char*> argv{"dgplate"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    Command c;
    c.help = app.help();
    for (CLI::App* sub : {run_cmd, list_cmd, energy_cmd}) {
      if (sub->parsed()) c.help = sub->help();
    }
    return c;
  } catch (const CLI::ExtrasError& e) {
    CLI::App* cmd = energy_cmd->parsed() ? energy_cmd : run_cmd;
    throw UsageError(std::string(e.what()) + " (valid flags: " + valid_flags(*cmd) + ")");
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  Command c;
  if (run_cmd->parsed()) {
    c.kind = CommandKind::run;
    c.config = collect(run_bound, run_flags);
    validate(c.config);
  } else if (list_cmd->parsed()) {
    c.kind = CommandKind::list_scenarios;
  } else if (energy_cmd->parsed()) {
    c.kind = CommandKind::energy;
    c.config = collect(energy_bound, energy_flags);
    c.checkpoint = checkpoint;
    (void)resolve(c.config);
  } else {
    c.help = app.help();
  }
  return c;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command cmd;
  try {
    cmd = parse_command_line(args);
  } catch (const ConfigError& e) {
    err << "dgplate: " << e.what() << '\n';
    return 2;
  } catch (const UnknownScenarioError& e) {
    err << "dgplate: " << e.what() << '\n';
    return 2;
  }
  try {
    switch (cmd.kind) {
      case CommandKind::help:
        out << cmd.help;
        return 0;
      case CommandKind::list_scenarios:
        for (const auto& s : registry()) {
          out << std::left << std::setw(18) << s.name << (s.free() ? "free     " : "clamped  ") << s.summary << '\n';
        }
        return 0;
      case CommandKind::energy: {
        const ScenarioSpec spec = resolve(cmd.config);
        const Checkpoint ckpt = read_checkpoint(cmd.checkpoint);
        const Discretization disc(spec);
        if (ckpt.y.size() != disc.space().dofs().n_y()) {
          err << "dgplate: checkpoint has " << ckpt.n_cells << " cells but " << spec.name << " at refinements "
              << spec.refinements << " has " << disc.mesh().n_cells() << '\n';
          return 2;
        }
        const auto& p = disc.problem();
        const double total = energy_bilayer(disc.space(), ckpt.y, p.curvature, p.data, p.load, p.penalty, true);
        const double bare = energy_bilayer(disc.space(), ckpt.y, p.curvature, p.data, p.load, p.penalty, false);
        out << std::setprecision(17) << "step " << ckpt.step << "\nenergy_total " << total << "\nenergy_no_constant "
            << bare << "\ndefect " << isometry_defect(disc.space(), ckpt.y) << '\n';
        return 0;
      }
      case CommandKind::run: {
        const RunSummary s = run(cmd.config, &err);
        out << std::setprecision(17) << "energy_total " << s.energy_total << "\nsteps " << s.steps << "\nconverged "
            << (s.converged ? "true" : "false") << '\n';
        return s.converged ? 0 : 3;
      }
    }
  } catch (const std::exception& e) {
    err << "dgplate: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace dgplate
