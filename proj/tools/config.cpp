// config.cpp — key-value configuration parsing and canonical hashing
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cbec/error.hpp"
#include "cli.hpp"

namespace cbec::cli {

namespace {

constexpr const char* kModule = "cli";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// 1-based line holding the key inside the section, or 0.
int locate(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current = "default";
  for (int n = 1; std::getline(in, line); ++n) {
    const std::string t = trim(line);
    if (t.size() > 1 && t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      continue;
    }
    if (current == section && trim(t.substr(0, t.find_first_of("=:"))) == key) return n;
  }
  return 0;
}

struct Context {
  std::string source;
  std::string section;
  std::string key;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    const std::string where = source + ":" + (line > 0 ? std::to_string(line) : std::string("?")) + ": ";
    throw Error(ErrorKind::ConfigParseError, kModule, where + "[" + section + "] " + key + ": " + what);
  }
};

double to_double(const Context& c, const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    c.fail("expected a finite number, got '" + s + "'");
  return v;
}

int to_int(const Context& c, const std::string& s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) c.fail("expected an integer, got '" + s + "'");
  return v;
}

bool to_bool(const Context& c, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  c.fail("expected true or false, got '" + s + "'");
}

template <class T>
T choose(const Context& c, const std::string& s, const std::map<std::string, T>& options) {
  const auto it = options.find(s);
  if (it != options.end()) return it->second;
  std::string names;
  for (const auto& [k, v] : options) names += (names.empty() ? "" : ", ") + k;
  c.fail("expected one of {" + names + "}, got '" + s + "'");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Couplings {
  std::optional<double> lambda_d, lambda_s, v, phi;
};

using KeyMap = std::map<std::string, std::function<void(const Context&, const std::string&)>>;

void grid_keys(KeyMap& keys,
               const std::string& section, RunConfig& cfg) {
  keys[section + ".phi_min_deg"] = [&cfg](auto& c, auto& v) { cfg.grid.phi_min_deg = to_double(c, v); };
  keys[section + ".phi_max_deg"] = [&cfg](auto& c, auto& v) { cfg.grid.phi_max_deg = to_double(c, v); };
  keys[section + ".phi_steps"] = [&cfg](auto& c, auto& v) { cfg.grid.phi_steps = to_int(c, v); };
  keys[section + ".omega_min_khz"] = [&cfg](auto& c, auto& v) { cfg.grid.omega_min = to_double(c, v); };
  keys[section + ".omega_max_khz"] = [&cfg](auto& c, auto& v) { cfg.grid.omega_max = to_double(c, v); };
  keys[section + ".omega_steps"] = [&cfg](auto& c, auto& v) { cfg.grid.omega_steps = to_int(c, v); };
}

KeyMap make_keys(RunConfig& cfg, Couplings& couplings) {
  KeyMap keys;
  keys["model.omega_khz"] = [&](auto& c, auto& s) { cfg.params.omega = to_double(c, s); };
  keys["model.omega0_khz"] = [&](auto& c, auto& s) { cfg.params.omega0 = to_double(c, s); };
  keys["model.kappa_khz"] = [&](auto& c, auto& s) { cfg.params.kappa = to_double(c, s); };
  keys["model.n_atoms"] = [&](auto& c, auto& s) { cfg.params.n_atoms = to_double(c, s); };
  keys["model.lambda_d_khz"] = [&](auto& c, auto& s) { couplings.lambda_d = to_double(c, s); };
  keys["model.lambda_s_khz"] = [&](auto& c, auto& s) { couplings.lambda_s = to_double(c, s); };
  keys["model.v_khz"] = [&](auto& c, auto& s) { couplings.v = to_double(c, s); };
  keys["model.phi_deg"] = [&](auto& c, auto& s) { couplings.phi = to_double(c, s); };

  keys["spectrum.max_occupation"] = [&](auto& c, auto& s) { cfg.max_occupation = to_int(c, s); };
  keys["spectrum.branches"] = [&](auto& c, auto& s) {
    cfg.all_branches = choose<bool>(c, s, {{"all", true}, {"normal", false}});
  };

  keys["evolve.t_end_ms"] = [&](auto& c, auto& s) { cfg.t_end_ms = to_double(c, s); };
  keys["evolve.dt_ms"] = [&](auto& c, auto& s) { cfg.dt_ms = to_double(c, s); };
  keys["evolve.seed_amplitude"] = [&](auto& c, auto& s) { cfg.seed_amplitude = to_double(c, s); };
  keys["evolve.a_squared_re"] = [&](auto& c, auto& s) {
    cfg.a_squared.real(to_double(c, s));
    cfg.seed_pairing = true;
  };
  keys["evolve.a_squared_im"] = [&](auto& c, auto& s) {
    cfg.a_squared.imag(to_double(c, s));
    cfg.seed_pairing = true;
  };
  keys["evolve.branch"] = [&](auto& c, auto& s) {
    cfg.branch = choose<EvolveBranch>(c, s, {{"normal", EvolveBranch::Normal}, {"stable", EvolveBranch::MostStable}});
  };

  grid_keys(keys, "phase-diagram", cfg);
  grid_keys(keys, "closed", cfg);
  keys["closed.criterion"] = [&](auto& c, auto& s) {
    cfg.criterion =
        choose<ClosedCriterion>(c, s, {{"exact", ClosedCriterion::Exact}, {"printed", ClosedCriterion::PrintedCubic}});
  };

  keys["finite.n_atoms"] = [&](auto& c, auto& s) { cfg.finite_atoms = to_int(c, s); };
  keys["finite.fock_cutoff"] = [&](auto& c, auto& s) { cfg.fock_cutoff = to_int(c, s); };
  keys["finite.spin_levels"] = [&](auto& c, auto& s) { cfg.spin_levels = to_int(c, s); };
  keys["finite.converge_cutoff"] = [&](auto& c, auto& s) { cfg.converge_cutoff = to_bool(c, s); };
  keys["finite.cutoff_tol"] = [&](auto& c, auto& s) { cfg.cutoff_tol = to_double(c, s); };

  keys["semiclassical.t_end_ms"] = [&](auto& c, auto& s) { cfg.t_end_ms = to_double(c, s); };
  keys["semiclassical.dt_ms"] = [&](auto& c, auto& s) { cfg.dt_ms = to_double(c, s); };
  keys["semiclassical.seed_amplitude"] = [&](auto& c, auto& s) { cfg.seed_amplitude = to_double(c, s); };
  keys["semiclassical.variant"] = [&](auto& c, auto& s) {
    cfg.variant = choose<SemiclassicalVariant>(
        c, s, {{"printed", SemiclassicalVariant::Printed}, {"corrected", SemiclassicalVariant::Corrected}});
  };

  return keys;
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::Spectrum: return "spectrum";
    case Command::Evolve: return "evolve";
    case Command::PhaseDiagram: return "phase-diagram";
    case Command::Closed: return "closed";
    case Command::Finite: return "finite";
    case Command::Semiclassical: return "semiclassical";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::Spectrum, Command::Evolve, Command::PhaseDiagram, Command::Closed, Command::Finite,
                    Command::Semiclassical})
    if (name == to_string(c)) return c;
  throw Error(ErrorKind::ConfigParseError, kModule, "unknown command '" + name + "'");
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source) {
  Couplings couplings;
  RunConfig other = cfg;
  const KeyMap keys = make_keys(cfg, couplings);
  const KeyMap other_keys = make_keys(other, couplings);
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ConfigParseError, kModule, source + ": " + e.what());
  }
  std::set<std::string> seen;
  Context first_polar, first_cartesian;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    Context c;
    c.source = source;
    c.key = item.name;
    for (const auto& p : item.parents) c.section += (c.section.empty() ? "" : ".") + p;
    if (c.section.empty()) c.section = "default";
    c.line = locate(text, c.section, c.key);
    const std::string full = c.section + "." + c.key;
    const bool foreign = c.section != "model" && c.section != to_string(cfg.command);
    const KeyMap& table = foreign ? other_keys : keys;
    const auto it = table.find(full);
    if (it == table.end()) c.fail("unknown key");
    if (!seen.insert(full).second) c.fail("duplicate key");
    if (item.inputs.size() != 1) c.fail("duplicate key or multiple values");
    it->second(c, trim(item.inputs.front()));
    if ((c.key == "v_khz" || c.key == "phi_deg") && first_polar.key.empty()) first_polar = c;
    if ((c.key == "lambda_d_khz" || c.key == "lambda_s_khz") && first_cartesian.key.empty()) first_cartesian = c;
  }
  if (!first_polar.key.empty() && !first_cartesian.key.empty())
    first_polar.fail("v_khz/phi_deg and lambda_d_khz/lambda_s_khz are mutually exclusive");
  if (couplings.v || couplings.phi) {
    const ModelParams polar =
        ModelParams::from_polar(couplings.v.value_or(0.0), couplings.phi.value_or(0.0), 0.0, 1.0, 0.0);
    cfg.params.lambda_d = polar.lambda_d;
    cfg.params.lambda_s = polar.lambda_s;
  }
  if (couplings.lambda_d) cfg.params.lambda_d = *couplings.lambda_d;
  if (couplings.lambda_s) cfg.params.lambda_s = *couplings.lambda_s;
}

std::string canonical_form(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["command"] = to_string(cfg.command);
  kv["model.omega_khz"] = fmt_double(cfg.params.omega);
  kv["model.omega0_khz"] = fmt_double(cfg.params.omega0);
  kv["model.lambda_d_khz"] = fmt_double(cfg.params.lambda_d);
  kv["model.lambda_s_khz"] = fmt_double(cfg.params.lambda_s);
  kv["model.kappa_khz"] = fmt_double(cfg.params.kappa);
  kv["model.n_atoms"] = fmt_double(cfg.params.n_atoms);
  kv["spectrum.max_occupation"] = std::to_string(cfg.max_occupation);
  kv["spectrum.branches"] = cfg.all_branches ? "all" : "normal";
  kv["run.t_end_ms"] = fmt_double(cfg.t_end_ms);
  kv["run.dt_ms"] = fmt_double(cfg.dt_ms);
  kv["run.seed_amplitude"] = fmt_double(cfg.seed_amplitude);
  kv["evolve.seed_pairing"] = cfg.seed_pairing ? "true" : "false";
  kv["evolve.a_squared_re"] = fmt_double(cfg.a_squared.real());
  kv["evolve.a_squared_im"] = fmt_double(cfg.a_squared.imag());
  kv["evolve.branch"] = cfg.branch == EvolveBranch::Normal ? "normal" : "stable";
  kv["semiclassical.variant"] = cfg.variant == SemiclassicalVariant::Printed ? "printed" : "corrected";
  kv["grid.phi_min_deg"] = fmt_double(cfg.grid.phi_min_deg);
  kv["grid.phi_max_deg"] = fmt_double(cfg.grid.phi_max_deg);
  kv["grid.phi_steps"] = std::to_string(cfg.grid.phi_steps);
  kv["grid.omega_min_khz"] = fmt_double(cfg.grid.omega_min);
  kv["grid.omega_max_khz"] = fmt_double(cfg.grid.omega_max);
  kv["grid.omega_steps"] = std::to_string(cfg.grid.omega_steps);
  kv["closed.criterion"] = cfg.criterion == ClosedCriterion::Exact ? "exact" : "printed";
  kv["finite.n_atoms"] = std::to_string(cfg.finite_atoms);
  kv["finite.fock_cutoff"] = std::to_string(cfg.fock_cutoff);
  kv["finite.spin_levels"] = std::to_string(cfg.spin_levels);
  kv["finite.converge_cutoff"] = cfg.converge_cutoff ? "true" : "false";
  kv["finite.cutoff_tol"] = fmt_double(cfg.cutoff_tol);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cbec::cli
