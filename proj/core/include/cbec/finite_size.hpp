// finite_size.hpp — exact truncated-Fock Liouvillian of the finite two-component model
#pragma once

#include <array>
#include <vector>

#include <Eigen/Sparse>

#include "cbec/linalg.hpp"
#include "cbec/model.hpp"
#include "cbec/ode.hpp"

namespace cbec {

using SparseCMatrix = Eigen::SparseMatrix<cplx>;

// Product basis |n⟩_cavity ⊗ |k₁⟩ ⊗ |k₂⟩ with k the number of raised spins
// (J_z = k − N/2) on the maximal-spin Dicke ladder, cavity index slowest.
struct FiniteModel {
  ModelParams params;
  int n_atoms = 1;       // atoms per condensate, j = N/2
  int fock_cutoff = 1;   // n_max
  int spin_levels = 0;   // ladder states kept per condensate; 0 keeps all N + 1

  int levels() const { return spin_levels > 0 ? spin_levels : n_atoms + 1; }
  int dims() const { return (fock_cutoff + 1) * levels() * levels(); }
  void validate() const;
};

// Superoperator-dimension cap: GL_MEM_BUDGET if set, else 4096.
long dimension_budget();

// Throws DimensionBudgetExceeded when dims² exceeds the budget.
void check_budget(const FiniteModel& fm, long budget = dimension_budget());

struct FiniteOperators {
  SparseCMatrix a, jp1, jp2, jz1, jz2, h;
};

FiniteOperators finite_operators(const FiniteModel& fm);

// Full superoperator acting on column-stacked vec(ρ).
CMatrix build_finite_liouvillian(const FiniteModel& fm);

// Superoperator with the jump term 2κLρL† multiplied by e^{−iχ}.
CMatrix deform_with_counting_field(const FiniteModel& fm, double chi);

// Parity P = (−1)^(n + k₁ + k₂) is conserved; ρ splits into blocks where the
// parities of row and column agree (sector 0) or differ (sector 1).
struct ParityBlock {
  std::vector<std::pair<int, int>> elements;  // (row, col) of ρ in block order
  CMatrix generator;
};

ParityBlock parity_block(const FiniteModel& fm, int sector, double chi = 0.0, long budget = dimension_budget());

// All eigenvalues, sorted by real part descending then imaginary part ascending.
std::vector<cplx> finite_spectrum(const FiniteModel& fm, long budget = dimension_budget());

struct CutoffConvergence {
  int fock_cutoff = 0;
  bool converged = false;
  std::vector<cplx> slowest;  // slowest 10 eigenvalues at the final cutoff
};

// Doubles n_max until the slowest 10 eigenvalues move by less than tol or the
// budget would be exceeded.
CutoffConvergence converge_fock_cutoff(FiniteModel fm, double tol = 1e-6, long budget = dimension_budget());

struct Occupation {
  int n_plus = 0, n_minus = 0, m_plus = 0, m_minus = 0;
};

struct PerturbativeMode {
  Occupation occupation;
  cplx lambda1{0.0};
  double normalization = 0.0;  // tr(σ†ρ) before normalization
  bool degenerate = false;     // normalization vanished
};

// λ⁽¹⁾ = −i tr(σ†[H, ρ])/tr(σ†ρ) for ρ = J₊^{n₊}J₊^{n₋}|vac⟩⟨vac|(J₊^{m₊}J₊^{m₋})† ⊗ |0⟩⟨0|
// and σ the same spin operator tensored with the cavity identity.
std::vector<PerturbativeMode> perturbative_splitting(const FiniteModel& fm, const std::vector<Occupation>& modes);

// Stationary density matrix from the parity-even block with unit trace.
CMatrix stationary_state(const FiniteModel& fm);

// Leading eigenvalue λ₀(χ) of the deformed generator (the one nearest 0).
cplx leading_eigenvalue(const FiniteModel& fm, double chi);

// Photon current −∂λ₀/∂(iχ) at χ = 0 by central difference with step h.
double photon_current(const FiniteModel& fm, double h = 1e-5);

// ρ(t) sampled at the requested times under the master equation, matrix-free.
struct DensityTrajectory {
  std::vector<double> times;
  std::vector<CMatrix> states;
  bool diverged = false;
};

DensityTrajectory evolve_density(const FiniteModel& fm, const CMatrix& rho0, const std::vector<double>& times,
                                 double tol = 1e-9);

// Product state: truncated cavity coherent state ⊗ both spins in the lowest ladder state.
CMatrix coherent_product_state(const FiniteModel& fm, cplx cavity_amplitude);

cplx expectation(const CMatrix& rho, const SparseCMatrix& op);

}  // namespace cbec
