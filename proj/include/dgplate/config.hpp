#ifndef DGPLATE_CONFIG_HPP
#define DGPLATE_CONFIG_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgplate/scenario.hpp"

namespace dgplate {

/// Malformed configuration text or flag value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown key or flag; the message lists the valid ones.
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// What to run and where to write it. Unset overrides keep the scenario's values.
struct RunConfig {
  std::string scenario = "clamped_identity";
  std::optional<int> refinements;
  std::optional<double> tau;
  std::optional<double> gamma0;
  std::optional<double> gamma1;
  std::optional<double> epsilon;
  std::optional<double> tol;
  std::optional<Index> max_steps;
  std::optional<double> cg_tol;
  std::optional<int> cg_max_iters;
  std::optional<bool> precondition;
  bool literal_phi_zero = false;

  Index snapshot_every = 1000;
  Index checkpoint_every = 10'000;
  Index trace_every = 1;
  std::string out = "dgplate_out";
  int threads = 1;
  bool deterministic = false;

  bool operator==(const RunConfig&) const = default;
};

/// Keys accepted in configuration files.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines; `#` starts a comment. Values override `base`.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig parse_config_file(const std::string& path, RunConfig base = {});

/// Writes every set field as `key = value` lines.
std::string serialize(const RunConfig& config);

/// Config that reproduces `spec` exactly when resolved.
RunConfig config_for(const ScenarioSpec& spec);

/// Registry scenario with the overrides applied; validates the result.
ScenarioSpec resolve(const RunConfig& config);

void validate(const ScenarioSpec& spec);
void validate(const RunConfig& config);

}  // namespace dgplate

#endif  // DGPLATE_CONFIG_HPP
