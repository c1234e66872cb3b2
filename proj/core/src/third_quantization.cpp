// third_quantization.cpp — structure matrices, rapidities, eigenvalue lattice, stationary covariance
#include "cbec/third_quantization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "cbec/error.hpp"

namespace cbec {

namespace {

constexpr const char* kModule = "third-quantization";
constexpr cplx I{0.0, 1.0};

bool rapidity_before(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() < b.imag();
}

}  // namespace

StructureMatrices assemble_structure(const QuadraticLiouvillian& l) {
  const CMatrix& h = l.h;
  const CMatrix& k = l.k;
  const CMatrix& m = l.m;
  StructureMatrices s;
  s.x = CMatrix::Zero(kPhaseSpace, kPhaseSpace);
  s.x.topLeftCorner(kModes, kModes) = 0.5 * (I * h.conjugate() + m);
  s.x.topRightCorner(kModes, kModes) = -I * k;
  s.x.bottomLeftCorner(kModes, kModes) = I * k.conjugate();
  s.x.bottomRightCorner(kModes, kModes) = 0.5 * (-I * h + m.conjugate());
  s.y = CMatrix::Zero(kPhaseSpace, kPhaseSpace);
  s.y.topLeftCorner(kModes, kModes) = -I * k.conjugate();
  s.y.bottomRightCorner(kModes, kModes) = I * k;
  return s;
}

bool SpectralData::stable() const {
  for (const auto& c : rapidities)
    if (!(c.real() > 0.0)) return false;
  return true;
}

SpectralData rapidities(const StructureMatrices& s) {
  SpectralData sd;
  CVector values;
  CMatrix vectors;
  try {
    EigenDecomposition ed = eig_complex(s.x);
    values = ed.values;
    vectors = ed.vectors;
    sd.diagonalizable = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonDiagonalizable) throw;
    values = eigenvalues_complex(s.x);
    sd.diagonalizable = false;
  }
  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return rapidity_before(values[i], values[j]); });
  sd.rapidities.resize(values.size());
  if (sd.diagonalizable) sd.mode_matrix.resize(vectors.rows(), vectors.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    sd.rapidities[k] = values[order[k]];
    if (sd.diagonalizable) sd.mode_matrix.col(k) = vectors.col(order[k]);
  }

  try {
    sd.covariance = solve_sylvester(s.x, s.x, s.y);
    sd.covariance_status = CovarianceStatus::Available;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularPencil) throw;
    sd.covariance.reset();
    sd.covariance_status = CovarianceStatus::SingularPencil;
  }
  if (!sd.diagonalizable && sd.covariance) {
    sd.covariance.reset();
    sd.covariance_status = CovarianceStatus::NotDiagonalizable;
  }
  return sd;
}

SpectralData spectral_data(const QuadraticLiouvillian& l) { return rapidities(assemble_structure(l)); }

EigenvalueLattice eigenvalue_lattice(const SpectralData& sd, int max_total_occupation) {
  if (!sd.diagonalizable)
    throw Error(ErrorKind::NonDiagonalizable, kModule, "lattice refused at an exceptional point");
  if (max_total_occupation < 0)
    throw Error(ErrorKind::InvalidArgument, kModule, "occupation cap must be nonnegative");
  const int n = static_cast<int>(sd.rapidities.size());
  EigenvalueLattice lattice;
  std::array<int, kPhaseSpace> occ{};
  std::function<void(int, int)> rec = [&](int r, int remaining) {
    if (r == n) {
      cplx v = 0.0;
      for (int i = 0; i < n; ++i) v += static_cast<double>(occ[i]) * sd.rapidities[i];
      lattice.entries.push_back({occ, -2.0 * v});
      return;
    }
    for (int q = 0; q <= remaining; ++q) {
      occ[r] = q;
      rec(r + 1, remaining - q);
    }
    occ[r] = 0;
  };
  rec(0, max_total_occupation);
  std::stable_sort(lattice.entries.begin(), lattice.entries.end(),
                   [](const LatticeEntry& a, const LatticeEntry& b) {
                     if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
                     return a.value.imag() < b.value.imag();
                   });
  return lattice;
}

PolyCoeffs normal_rapidity_polynomial(const ModelParams& p) {
  const double w = p.omega, w0 = p.omega0, k = p.kappa;
  const double d2 = p.lambda_d * p.lambda_d, s2 = p.lambda_s * p.lambda_s, v2 = d2 + s2;
  const double w02 = w0 * w0, w04 = w02 * w02;
  PolyCoeffs poly;
  poly.coefficients = {
      w02 * (-20.0 * w * w0 * v2 + 4.0 * (9.0 * d2 + s2) * (d2 + 9.0 * s2) + w02 * (k * k + w * w)),
      24.0 * k * w02 * v2 - 4.0 * k * w04,
      4.0 * (2.0 * w02 * (-6.0 * v2 + k * k + w * w) - 20.0 * w * w0 * v2 + 36.0 * v2 * v2 + w04),
      96.0 * k * v2 - 32.0 * k * w02,
      16.0 * (-12.0 * d2 + k * k - 12.0 * s2 + w * w + 2.0 * w02),
      -64.0 * k,
      64.0,
  };
  return poly;
}

cplx large_kappa_eigenvalue(const ModelParams& p, int n1, int n2) {
  const double gamma2 = p.lambda_d * p.lambda_d + p.lambda_s * p.lambda_s;
  if (n2 == 0) return cplx(0.0, n1 * p.omega0);
  return cplx(2.0 * n2 * gamma2 / p.kappa, n1 * p.omega0);
}

double extracted_gamma_squared(const ModelParams& p, const SpectralData& sd) {
  const double floor = 1e-12 * p.frequency_scale();
  double best = -1.0;
  for (const auto& c : sd.rapidities) {
    const double re = std::abs(c.real());
    if (re > floor && (best < 0.0 || re < best)) best = re;
  }
  return best < 0.0 ? 0.0 : p.kappa * best;
}

cplx large_kappa_eigenvalue(const ModelParams& p, const SpectralData& sd, int n1, int n2) {
  if (n2 == 0) return cplx(0.0, n1 * p.omega0);
  return cplx(2.0 * n2 * extracted_gamma_squared(p, sd) / p.kappa, n1 * p.omega0);
}

}  // namespace cbec
