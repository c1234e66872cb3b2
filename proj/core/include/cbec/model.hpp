// model.hpp — model parameters, mean-field shift branches and quadratic generators
#pragma once

#include <array>
#include <vector>

#include "cbec/linalg.hpp"

namespace cbec {

// Mode order used by every 6-component object: (a, b1, b2, a†, b1†, b2†).
inline constexpr int kModes = 3;
inline constexpr int kPhaseSpace = 6;

struct ModelParams {
  double omega = 0.0;     // cavity detuning ω (angular kHz)
  double omega0 = 1.0;    // Zeeman splitting ω₀ (angular kHz)
  double lambda_d = 0.0;  // density-mode coupling λ_D (angular kHz)
  double lambda_s = 0.0;  // spin-mode coupling λ_S (angular kHz)
  double kappa = 0.0;     // cavity loss rate κ (angular kHz)
  double n_atoms = 1.0;   // atoms per condensate N

  // λ_D = V cos φ, λ_S = V sin φ with φ in degrees.
  static ModelParams from_polar(double v, double phi_deg, double omega, double omega0, double kappa,
                                double n_atoms = 1.0);
  double coupling_strength() const;   // V
  double coupling_angle_deg() const;  // φ in degrees
  double frequency_scale() const;     // largest rate magnitude, at least 1
  void validate() const;              // throws InvalidArgument
};

enum class BranchKind { Normal, Superradiant };

const char* to_string(BranchKind kind);

// Shifts of the Holstein-Primakoff expansion: a → a + α√N and b_i → b_i − √β_i √N.
// root_beta_i stores the signed square root √β_i; beta_i = root_beta_i².
struct MeanFieldBranch {
  cplx alpha{0.0};
  cplx beta1{0.0}, beta2{0.0};
  cplx root_beta1{0.0}, root_beta2{0.0};
  BranchKind kind = BranchKind::Normal;
  bool physical = false;

  static MeanFieldBranch normal();
  static MeanFieldBranch from_roots(cplx alpha, cplx root_beta1, cplx root_beta2);
  double shift_magnitude() const;  // max |α|, |√β₁|, |√β₂|
};

struct QuadraticLiouvillian {
  CMatrix h;  // 3×3 Hermitian, coefficients of a_i† a_j
  CMatrix k;  // 3×3 symmetric, coefficients of a_i a_j (conjugate multiplies a_i† a_j†)
  CMatrix m;  // 3×3 dissipator bilinear, κ at the cavity diagonal
  CVector g;  // 6-vector residual linear drive of the first moments
  MeanFieldBranch branch;
};

QuadraticLiouvillian build_normal_liouvillian(const ModelParams& p);

// Classical mean-field velocity (Ȧ, Ḃ₁, Ḃ₂) for scaled means A = ⟨a⟩/√N, B_i = ⟨b_i⟩/√N.
std::array<cplx, 3> mean_field_velocity(const ModelParams& p, cplx a, cplx b1, cplx b2);

// Scaled classical energy e = ⟨H⟩/N of the expanded Hamiltonian at (A, B₁, B₂).
double mean_field_energy(const ModelParams& p, cplx a, cplx b1, cplx b2);

// Six-component linear term (velocity and its conjugate) at the shifted point of a branch.
CVector linear_term(const ModelParams& p, const MeanFieldBranch& b);

struct ShiftSolverOptions {
  int grid = 24;                // seeds per axis of the condensate seeding grid
  int max_seeds = 10000;        // budget cap on grid² plus analytic seeds
  double merge_tol = 1e-6;      // duplicates closer than this are merged
  double residual_tol = 1e-11;  // relative to the frequency scale
  int max_newton = 100;
};

// All stationary mean-field branches: the normal branch first, then superradiant
// branches in deterministic order. Throws RootFindingFailure if no seed converges.
std::vector<MeanFieldBranch> solve_shift_equations(const ModelParams& p,
                                                   const ShiftSolverOptions& options = {});

// Keeps branches inside the Bloch sphere (|√β_i| ≤ 1, so β_iβ_i* ∈ [0, 2]) with
// Hermitian generators, and sets their physical flag.
std::vector<MeanFieldBranch> filter_physical_branches(const ModelParams& p,
                                                      std::vector<MeanFieldBranch> branches);

// Quadratic generator around a stationary branch. Throws NonvanishingLinearTerm
// if the branch is not stationary within 1e-8 of the frequency scale.
QuadraticLiouvillian build_superradiant_liouvillian(const ModelParams& p, const MeanFieldBranch& b);

// Dispatches on the branch kind.
QuadraticLiouvillian build_liouvillian(const ModelParams& p, const MeanFieldBranch& b);

}  // namespace cbec
