// linalg.hpp — dense complex eigensolver, polynomial roots and Sylvester solver
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace cbec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Throws InvalidArgument when any entry is NaN or infinite.
void require_finite(const CMatrix& m, const char* module);

// Largest absolute entry; used as the scale in relative tolerances.
double max_abs(const CMatrix& m);

struct EigenDecomposition {
  CVector values;   // sorted by (real, imaginary) ascending
  CMatrix vectors;  // unit-norm columns matching values
};

// Eigenvalues and right eigenvectors of a square matrix (LAPACK zgeev).
// Throws NonConvergence if QR iteration fails and NonDiagonalizable if the
// column-normalized eigenvector matrix has condition number above 1e12.
EigenDecomposition eig_complex(const CMatrix& m);

// Eigenvalues only, same ordering as eig_complex.
CVector eigenvalues_complex(const CMatrix& m);

// Lexicographic (real, imaginary) ascending comparison.
bool lex_less(const cplx& a, const cplx& b);

struct PolyCoeffs {
  std::vector<cplx> coefficients;  // ascending degree

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  cplx operator()(cplx z) const;
  cplx derivative(cplx z) const;
  double max_coefficient() const;
  static PolyCoeffs from_roots(const std::vector<cplx>& roots, cplx leading = 1.0);
};

// Roots via companion-matrix eigenvalues with one Newton polish step each,
// sorted lexicographically. Throws DegenerateLeadingCoefficient for degree < 1
// or a vanishing leading coefficient.
std::vector<cplx> poly_roots(const PolyCoeffs& p);

// Solves aᵀ Z + Z b = c (Bartels–Stewart on complex Schur forms).
// Throws SingularPencil when an eigenvalue of aᵀ is (numerically) the
// negative of an eigenvalue of b.
CMatrix solve_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c);

}  // namespace cbec
