// stability.hpp — one- and two-point stability, closed-system frequencies and phase sweeps
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cbec/linalg.hpp"
#include "cbec/model.hpp"

namespace cbec {

struct OnePointStability {
  double max_re = 0.0;
  double im_at_max = 0.0;  // nonnegative representative of the conjugate pair
};

OnePointStability one_point_stability(const CMatrix& drift);

// Max Re(λ_i + λ_j) over pairs of drift eigenvalues, i ≤ j.
double two_point_stability(const CMatrix& drift);

// Roots f of the printed closed-system cubic, sorted lexicographically.
std::array<cplx, 3> closed_frequencies(const ModelParams& p);

// ν = 2√(−f) for each root.
std::array<cplx, 3> bogoliubov_frequencies(const std::array<cplx, 3>& f);

// Printed closed-system cubic coefficients (ascending degree).
PolyCoeffs closed_polynomial(const ModelParams& p);

enum class ClosedPhase { Normal, Superradiant, Inaccessible };

const char* to_string(ClosedPhase phase);

// True when the κ = 0 generator of a branch has a purely imaginary spectrum.
bool closed_spectrum_is_real(const ModelParams& p, const MeanFieldBranch& b);

// Exact: the normal branch is accepted when its κ = 0 generator has a purely
// imaginary spectrum. PrintedCubic: it is accepted when every root f of the
// printed cubic is real and negative.
enum class ClosedCriterion { Exact, PrintedCubic };

// True when all roots of the printed cubic are real and negative.
bool closed_cubic_is_physical(const ModelParams& p);

// Classifies the closed system (κ forced to 0): Normal if the unshifted branch
// passes the criterion, Superradiant if some physical shifted branch has a purely
// imaginary κ = 0 spectrum, Inaccessible otherwise.
ClosedPhase classify_closed_phase(const ModelParams& p, const ShiftSolverOptions& options = {},
                                  ClosedCriterion criterion = ClosedCriterion::Exact);

struct SweepGrid {
  double phi_min_deg = 0.0, phi_max_deg = 90.0;
  int phi_steps = 181;
  double omega_min = 5.0, omega_max = 505.0;
  int omega_steps = 200;
};

struct BranchStability {
  MeanFieldBranch branch;
  OnePointStability one_point;
  double max_re_two_point = 0.0;
};

struct StabilityRecord {
  double phi_deg = 0.0;
  double omega = 0.0;
  OnePointStability normal_one_point;
  double normal_two_point = 0.0;
  std::optional<BranchStability> best_superradiant;  // minimizes one-point max Re
  std::vector<BranchStability> branches;             // every physical branch, normal first
  double max_re_one_point = 0.0;   // of the most stable branch overall
  double im_at_max_one_point = 0.0;
  double max_re_two_point = 0.0;   // of the most stable branch overall
  BranchKind branch_kind = BranchKind::Normal;
  ClosedPhase closed_phase = ClosedPhase::Inaccessible;
  std::string error;  // empty when the cell succeeded
};

// Evaluates one parameter point.
StabilityRecord analyse_point(const ModelParams& p, double phi_deg, const ShiftSolverOptions& options = {});

// Grid rows ordered by φ then ω; λ_D, λ_S are set from V = p_base.coupling_strength().
// Per-cell failures are stored in the record. threads = 0 uses hardware concurrency.
std::vector<StabilityRecord> sweep_phase_diagram(const SweepGrid& grid, const ModelParams& p_base,
                                                 unsigned threads = 0, const ShiftSolverOptions& options = {});

}  // namespace cbec
