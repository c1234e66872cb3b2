// cli.hpp — configuration, orchestration and file output of the cbec command-line tool
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cbec/finite_size.hpp"
#include "cbec/model.hpp"
#include "cbec/semiclassical.hpp"
#include "cbec/stability.hpp"

namespace cbec::cli {

enum class Command { Spectrum, Evolve, PhaseDiagram, Closed, Finite, Semiclassical };

const char* to_string(Command c);
Command parse_command(const std::string& name);  // throws ConfigParseError

enum class EvolveBranch { Normal, MostStable };

struct RunConfig {
  Command command = Command::Spectrum;
  ModelParams params;
  std::string out_dir = ".";
  unsigned threads = 1;

  // spectrum
  int max_occupation = 2;
  bool all_branches = true;

  // evolve and semiclassical
  double t_end_ms = 1.0;
  double dt_ms = 0.001;
  double seed_amplitude = 0.1;  // ⟨a(0)⟩
  bool seed_pairing = false;    // use ⟨a²(0)⟩ below instead of a vacuum covariance
  cplx a_squared{0.0};
  EvolveBranch branch = EvolveBranch::Normal;
  SemiclassicalVariant variant = SemiclassicalVariant::Corrected;

  // phase-diagram and closed
  SweepGrid grid;
  ClosedCriterion criterion = ClosedCriterion::Exact;

  // finite
  int finite_atoms = 2;
  int fock_cutoff = 4;
  int spin_levels = 0;
  bool converge_cutoff = false;
  double cutoff_tol = 1e-6;
};

// Parses the key-value configuration text. Sections are [model] and one per
// command; every physical key carries its unit in the name. Sections of other
// commands are validated but not applied. Errors name the source, line and key.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source = "config");

// Canonical key=value listing of every resolved setting, one per line, sorted.
std::string canonical_form(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

// Runs one command and writes its files into cfg.out_dir. Returns 0 on
// success and 2 when some sweep cells failed.
int execute(const RunConfig& cfg, std::ostream& log);

// Full command-line entry point. Returns 0, 1 on fatal errors or 2 on partial failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cbec::cli
