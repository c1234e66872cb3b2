// third_quantization.hpp — structure matrices, rapidities, eigenvalue lattice, stationary covariance
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cbec/linalg.hpp"
#include "cbec/model.hpp"

namespace cbec {

struct StructureMatrices {
  CMatrix x;  // 6×6
  CMatrix y;  // 6×6 symmetric
};

// X = ½[[iH* + M, −2iK], [2iK*, −iH + M*]], Y = [[−iK*, 0], [0, iK]].
StructureMatrices assemble_structure(const QuadraticLiouvillian& l);

enum class CovarianceStatus { Available, SingularPencil, NotDiagonalizable };

struct SpectralData {
  CVector rapidities;   // descending real part, then ascending imaginary part
  CMatrix mode_matrix;  // columns are eigenvectors of X (empty if not diagonalizable)
  std::optional<CMatrix> covariance;  // Z solving XᵀZ + ZX = Y
  CovarianceStatus covariance_status = CovarianceStatus::SingularPencil;
  bool diagonalizable = false;

  // True when every Liouvillian eigenvalue −2Σnχ decays (all Re χ > 0).
  bool stable() const;
};

// Diagonalizes X and solves for Z. Exceptional points and singular pencils are
// reported through the flags instead of throwing.
SpectralData rapidities(const StructureMatrices& s);

// Convenience: assemble and diagonalize.
SpectralData spectral_data(const QuadraticLiouvillian& l);

struct LatticeEntry {
  std::array<int, kPhaseSpace> occupation{};
  cplx value{0.0};
};

struct EigenvalueLattice {
  std::vector<LatticeEntry> entries;  // sorted by real part descending
};

// λ = −2Σ n_r χ_r over all occupations with Σn_r ≤ max_total_occupation.
// Throws NonDiagonalizable when the spectral data is defective.
EigenvalueLattice eigenvalue_lattice(const SpectralData& sd, int max_total_occupation);

// Degree-6 normal-phase polynomial in χ with the printed coefficients.
PolyCoeffs normal_rapidity_polynomial(const ModelParams& p);

// i n₁ ω₀ + 2 n₂ Γ²/κ with Γ² = λ_D² + λ_S².
cplx large_kappa_eigenvalue(const ModelParams& p, int n1, int n2);

// Same law with Γ² extracted from the slowest decaying rapidity of a branch.
cplx large_kappa_eigenvalue(const ModelParams& p, const SpectralData& sd, int n1, int n2);

// Γ² = κ·min |Re χ| over rapidities with nonzero real part.
double extracted_gamma_squared(const ModelParams& p, const SpectralData& sd);

}  // namespace cbec
