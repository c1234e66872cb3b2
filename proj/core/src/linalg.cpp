// linalg.cpp — dense complex eigensolver, polynomial roots and Sylvester solver
#include "cbec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <lapacke.h>

#include "cbec/error.hpp"

namespace cbec {

namespace {

constexpr const char* kModule = "linalg";

void require_square(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorKind::InvalidArgument, kModule, "matrix must be square and nonempty");
}

// Runs zgeev on a column-major copy of m; vectors optional.
void run_zgeev(const CMatrix& m, CVector& values, CMatrix* vectors) {
  require_square(m);
  require_finite(m, kModule);
  const lapack_int n = static_cast<lapack_int>(m.rows());
  CMatrix work = m;
  values.resize(n);
  CMatrix vr;
  if (vectors) vr.resize(n, n);
  lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n,
      reinterpret_cast<lapack_complex_double*>(values.data()), nullptr, 1,
      vectors ? reinterpret_cast<lapack_complex_double*>(vr.data()) : nullptr, n);
  if (info > 0)
    throw Error(ErrorKind::NonConvergence, kModule, "QR iteration failed to converge");
  if (info < 0) throw Error(ErrorKind::InvalidArgument, kModule, "zgeev rejected its arguments");
  if (vectors) *vectors = std::move(vr);
}

std::vector<Eigen::Index> lex_order(const CVector& v) {
  std::vector<Eigen::Index> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return lex_less(v[i], v[j]); });
  return idx;
}

}  // namespace

void require_finite(const CMatrix& m, const char* module) {
  if (!m.allFinite()) throw Error(ErrorKind::InvalidArgument, module, "matrix has non-finite entries");
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool lex_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

EigenDecomposition eig_complex(const CMatrix& m) {
  CVector values;
  CMatrix vectors;
  run_zgeev(m, values, &vectors);
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) vectors.col(k).normalize();
  Eigen::JacobiSVD<CMatrix> svd(vectors);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (!(smin > 0.0) || sv[0] / smin > 1e12)
    throw Error(ErrorKind::NonDiagonalizable, kModule, "eigenvector matrix is ill-conditioned");

  const auto order = lex_order(values);
  EigenDecomposition out;
  out.values.resize(values.size());
  out.vectors.resize(vectors.rows(), vectors.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values[k] = values[order[k]];
    out.vectors.col(k) = vectors.col(order[k]);
  }
  return out;
}

CVector eigenvalues_complex(const CMatrix& m) {
  CVector values;
  run_zgeev(m, values, nullptr);
  std::sort(values.begin(), values.end(), lex_less);
  return values;
}

cplx PolyCoeffs::operator()(cplx z) const {
  cplx acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cplx PolyCoeffs::derivative(cplx z) const {
  cplx acc = 0.0;
  for (std::size_t k = coefficients.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * coefficients[k];
  return acc;
}

double PolyCoeffs::max_coefficient() const {
  double m = 0.0;
  for (const auto& c : coefficients) m = std::max(m, std::abs(c));
  return m;
}

PolyCoeffs PolyCoeffs::from_roots(const std::vector<cplx>& roots, cplx leading) {
  std::vector<cplx> c{leading};
  for (const auto& r : roots) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return PolyCoeffs{std::move(c)};
}

std::vector<cplx> poly_roots(const PolyCoeffs& p) {
  const int n = p.degree();
  if (n < 1)
    throw Error(ErrorKind::DegenerateLeadingCoefficient, kModule, "polynomial degree must be at least 1");
  const cplx lead = p.coefficients.back();
  if (lead == cplx(0.0) || !std::isfinite(std::abs(lead)))
    throw Error(ErrorKind::DegenerateLeadingCoefficient, kModule, "leading coefficient vanishes");

  CMatrix companion = CMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
  for (int k = 0; k < n; ++k) companion(k, n - 1) = -p.coefficients[k] / lead;
  CVector values = eigenvalues_complex(companion);

  std::vector<cplx> roots(values.begin(), values.end());
  for (auto& r : roots) {
    const cplx d = p.derivative(r);
    if (d == cplx(0.0)) continue;
    const cplx polished = r - p(r) / d;
    if (std::isfinite(std::abs(polished)) && std::abs(p(polished)) < std::abs(p(r))) r = polished;
  }
  std::sort(roots.begin(), roots.end(), lex_less);
  return roots;
}

CMatrix solve_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  require_square(a);
  require_square(b);
  if (c.rows() != a.rows() || c.cols() != b.rows())
    throw Error(ErrorKind::InvalidArgument, kModule, "sylvester operand shapes disagree");
  require_finite(a, kModule);
  require_finite(b, kModule);
  require_finite(c, kModule);

  Eigen::ComplexSchur<CMatrix> sa(a.transpose());
  Eigen::ComplexSchur<CMatrix> sb(b);
  if (sa.info() != Eigen::Success || sb.info() != Eigen::Success)
    throw Error(ErrorKind::NonConvergence, kModule, "Schur decomposition failed");
  const CMatrix& t = sa.matrixT();
  const CMatrix& s = sb.matrixT();
  const CMatrix& u = sa.matrixU();
  const CMatrix& v = sb.matrixU();

  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = 1e3 * eps * (a.norm() + b.norm());
  const Eigen::Index n = t.rows();
  const Eigen::Index m = s.rows();
  CMatrix f = u.adjoint() * c * v;
  CMatrix w = CMatrix::Zero(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    CVector rhs = f.col(j);
    for (Eigen::Index k = 0; k < j; ++k) rhs -= s(k, j) * w.col(k);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      const cplx diag = t(i, i) + s(j, j);
      if (std::abs(diag) <= tol)
        throw Error(ErrorKind::SingularPencil, kModule, "spectra of a^T and -b intersect");
      cplx acc = rhs[i];
      for (Eigen::Index k = i + 1; k < n; ++k) acc -= t(i, k) * w(k, j);
      w(i, j) = acc / diag;
    }
  }
  CMatrix z = u * w * v.adjoint();
  const double residual = (a.transpose() * z + z * b - c).norm();
  if (!(residual <= 1e-9 * std::max(c.norm(), std::numeric_limits<double>::min())) && c.norm() > 0.0)
    throw Error(ErrorKind::SingularPencil, kModule, "sylvester residual exceeds tolerance");
  return z;
}

}  // namespace cbec
