#ifndef DGPLATE_CLI_HPP
#define DGPLATE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "dgplate/config.hpp"

namespace dgplate {

enum class CommandKind { run, list_scenarios, energy, help };

struct Command {
  CommandKind kind = CommandKind::help;
  RunConfig config;
  std::string checkpoint;  // for `energy`
  std::string help;        // usage text when kind == help
};

/// Parses `dgplate <run|list-scenarios|energy> [--config file] [flags]`.
/// Values from `--config` are read first and flags override them. Throws
/// UsageError for unknown flags and ConfigError for bad values.
Command parse_command_line(const std::vector<std::string>& args);

/// Entry point of the executable; returns the process exit status:
/// 0 success (converged), 1 runtime failure, 2 usage or config error,
/// 3 flow stopped without converging.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dgplate

#endif  // DGPLATE_CLI_HPP
