#include "dgplate/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace dgplate {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("'" + v + "' is not a valid number");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + v + "' is not a boolean");
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"scenario", [](RunConfig& c, const std::string& v) { c.scenario = v; }},
      {"refinements", [](RunConfig& c, const std::string& v) { c.refinements = parse_number<int>(v); }},
      {"tau", [](RunConfig& c, const std::string& v) { c.tau = parse_number<double>(v); }},
      {"gamma0", [](RunConfig& c, const std::string& v) { c.gamma0 = parse_number<double>(v); }},
      {"gamma1", [](RunConfig& c, const std::string& v) { c.gamma1 = parse_number<double>(v); }},
      {"epsilon", [](RunConfig& c, const std::string& v) { c.epsilon = parse_number<double>(v); }},
      {"tol", [](RunConfig& c, const std::string& v) { c.tol = parse_number<double>(v); }},
      {"max_steps", [](RunConfig& c, const std::string& v) { c.max_steps = parse_number<Index>(v); }},
      {"cg_tol", [](RunConfig& c, const std::string& v) { c.cg_tol = parse_number<double>(v); }},
      {"cg_max_iters", [](RunConfig& c, const std::string& v) { c.cg_max_iters = parse_number<int>(v); }},
      {"precondition", [](RunConfig& c, const std::string& v) { c.precondition = parse_bool(v); }},
      {"literal_phi_zero", [](RunConfig& c, const std::string& v) { c.literal_phi_zero = parse_bool(v); }},
      {"snapshot_every", [](RunConfig& c, const std::string& v) { c.snapshot_every = parse_number<Index>(v); }},
      {"checkpoint_every", [](RunConfig& c, const std::string& v) { c.checkpoint_every = parse_number<Index>(v); }},
      {"trace_every", [](RunConfig& c, const std::string& v) { c.trace_every = parse_number<Index>(v); }},
      {"out", [](RunConfig& c, const std::string& v) { c.out = v; }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = parse_number<int>(v); }},
      {"deterministic", [](RunConfig& c, const std::string& v) { c.deterministic = parse_bool(v); }},
  };
  return m;
}

std::string key_list() {
  std::string s;
  for (const auto& k : config_keys()) s += (s.empty() ? "" : ", ") + k;
  return s;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value', got '" + content + "'");
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw UsageError("line " + std::to_string(number) + ": unknown key '" + key + "' (valid keys: " + key_list() + ")");
    }
    if (value.empty()) throw ConfigError("line " + std::to_string(number) + ": missing value for '" + key + "'");
    try {
      it->second(base, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + key + ": " + e.what());
    }
  }
  return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config_text(text.str(), std::move(base));
  } catch (const UsageError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  const auto put = [&](const std::string& key, const std::string& value) { os << key << " = " << value << '\n'; };
  put("scenario", c.scenario);
  if (c.refinements) put("refinements", std::to_string(*c.refinements));
  if (c.tau) put("tau", format_double(*c.tau));
  if (c.gamma0) put("gamma0", format_double(*c.gamma0));
  if (c.gamma1) put("gamma1", format_double(*c.gamma1));
  if (c.epsilon) put("epsilon", format_double(*c.epsilon));
  if (c.tol) put("tol", format_double(*c.tol));
  if (c.max_steps) put("max_steps", std::to_string(*c.max_steps));
  if (c.cg_tol) put("cg_tol", format_double(*c.cg_tol));
  if (c.cg_max_iters) put("cg_max_iters", std::to_string(*c.cg_max_iters));
  if (c.precondition) put("precondition", *c.precondition ? "true" : "false");
  put("literal_phi_zero", c.literal_phi_zero ? "true" : "false");
  put("snapshot_every", std::to_string(c.snapshot_every));
  put("checkpoint_every", std::to_string(c.checkpoint_every));
  put("trace_every", std::to_string(c.trace_every));
  put("out", c.out);
  put("threads", std::to_string(c.threads));
  put("deterministic", c.deterministic ? "true" : "false");
  return os.str();
}

RunConfig config_for(const ScenarioSpec& spec) {
  RunConfig c;
  c.scenario = spec.name;
  c.refinements = spec.refinements;
  c.tau = spec.flow.tau;
  c.gamma0 = spec.penalty.gamma0;
  c.gamma1 = spec.penalty.gamma1;
  c.epsilon = spec.penalty.epsilon;
  c.tol = spec.flow.energy_tol;
  c.max_steps = spec.flow.max_steps;
  c.cg_tol = spec.flow.cg_tol;
  c.cg_max_iters = spec.flow.cg_max_iters;
  c.precondition = spec.flow.precondition;
  c.literal_phi_zero = spec.literal_phi_zero;
  return c;
}

ScenarioSpec resolve(const RunConfig& c) {
  ScenarioSpec s = find_scenario(c.scenario);
  if (c.refinements) s.refinements = *c.refinements;
  if (c.tau) s.flow.tau = *c.tau;
  if (c.gamma0) s.penalty.gamma0 = *c.gamma0;
  if (c.gamma1) s.penalty.gamma1 = *c.gamma1;
  if (c.epsilon) s.penalty.epsilon = *c.epsilon;
  if (c.tol) s.flow.energy_tol = *c.tol;
  if (c.max_steps) s.flow.max_steps = *c.max_steps;
  if (c.cg_tol) s.flow.cg_tol = *c.cg_tol;
  if (c.cg_max_iters) s.flow.cg_max_iters = *c.cg_max_iters;
  if (c.precondition) s.flow.precondition = *c.precondition;
  s.literal_phi_zero = c.literal_phi_zero;
  validate(s);
  return s;
}

void validate(const ScenarioSpec& s) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (s.refinements < 0 || s.refinements > 12) throw ConfigError("refinements must lie in [0, 12]");
  if (!positive(s.flow.tau)) throw ConfigError("tau must be positive");
  if (!positive(s.penalty.gamma0) || !positive(s.penalty.gamma1)) throw ConfigError("gamma0 and gamma1 must be positive");
  if (!std::isfinite(s.penalty.epsilon) || s.penalty.epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
  if (!positive(s.flow.energy_tol)) throw ConfigError("tol must be positive");
  if (s.flow.max_steps < 0) throw ConfigError("max_steps must be >= 0");
  if (!positive(s.flow.cg_tol)) throw ConfigError("cg_tol must be positive");
  if (s.flow.cg_max_iters < 1) throw ConfigError("cg_max_iters must be >= 1");
  if (s.literal_phi_zero && s.free()) throw ConfigError("literal_phi_zero needs a clamped scenario");
}

void validate(const RunConfig& c) {
  if (c.snapshot_every < 1 || c.checkpoint_every < 1 || c.trace_every < 1) {
    throw ConfigError("snapshot_every, checkpoint_every and trace_every must be >= 1");
  }
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.out.empty()) throw ConfigError("out must not be empty");
  (void)resolve(c);
}

}  // namespace dgplate
