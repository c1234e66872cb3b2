// finite_size.cpp — exact truncated-Fock Liouvillian of the finite two-component model
#include "cbec/finite_size.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "cbec/error.hpp"

namespace cbec {

namespace {

constexpr const char* kModule = "finite-size";
constexpr cplx I{0.0, 1.0};

using Triplet = Eigen::Triplet<cplx>;

SparseCMatrix from_triplets(int n, const std::vector<Triplet>& t) {
  SparseCMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

int parity_of(const FiniteModel& fm, int index) {
  const int l = fm.levels();
  const int k2 = index % l, k1 = (index / l) % l, n = index / (l * l);
  return (n + k1 + k2) & 1;
}

struct ElementMap {
  std::vector<std::pair<int, int>> elements;
  std::vector<int> position;  // by i + j·dims, −1 when outside the block
};

ElementMap element_map(const FiniteModel& fm, int sector) {
  const int d = fm.dims();
  ElementMap em;
  em.position.assign(static_cast<std::size_t>(d) * d, -1);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      if (sector >= 0 && ((parity_of(fm, i) ^ parity_of(fm, j)) != sector)) continue;
      em.position[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * d] = static_cast<int>(em.elements.size());
      em.elements.emplace_back(i, j);
    }
  return em;
}

// Generator restricted to the listed elements: ℒE_ij = G E_ij + E_ij G† + 2κe^{−iχ} a E_ij a†.
CMatrix assemble_generator(const FiniteModel& fm, const ElementMap& em, double chi) {
  const FiniteOperators ops = finite_operators(fm);
  const int d = fm.dims();
  const double kappa = fm.params.kappa;
  const SparseCMatrix n_op = ops.a.adjoint() * ops.a;
  SparseCMatrix g = cplx(0.0, -1.0) * ops.h - cplx(kappa, 0.0) * n_op;
  g.makeCompressed();
  const cplx jump = 2.0 * kappa * std::exp(cplx(0.0, -chi));
  const std::size_t n = em.elements.size();
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto pos = [&](int i, int j) { return em.position[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * d]; };
  for (std::size_t c = 0; c < n; ++c) {
    const auto [i, j] = em.elements[c];
    for (SparseCMatrix::InnerIterator it(g, i); it; ++it) {
      const int r = pos(static_cast<int>(it.row()), j);
      if (r >= 0) out(r, static_cast<Eigen::Index>(c)) += it.value();
    }
    for (SparseCMatrix::InnerIterator it(g, j); it; ++it) {
      const int r = pos(i, static_cast<int>(it.row()));
      if (r >= 0) out(r, static_cast<Eigen::Index>(c)) += std::conj(it.value());
    }
    if (kappa != 0.0)
      for (SparseCMatrix::InnerIterator ik(ops.a, i); ik; ++ik)
        for (SparseCMatrix::InnerIterator il(ops.a, j); il; ++il) {
          const int r = pos(static_cast<int>(ik.row()), static_cast<int>(il.row()));
          if (r >= 0) out(r, static_cast<Eigen::Index>(c)) += jump * ik.value() * std::conj(il.value());
        }
  }
  return out;
}

bool spectrum_before(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() < b.imag();
}

}  // namespace

void FiniteModel::validate() const {
  params.validate();
  if (n_atoms < 1) throw Error(ErrorKind::InvalidArgument, kModule, "n_atoms must be at least 1");
  if (fock_cutoff < 0) throw Error(ErrorKind::InvalidArgument, kModule, "fock cutoff must be nonnegative");
  if (spin_levels < 0 || spin_levels > n_atoms + 1)
    throw Error(ErrorKind::InvalidArgument, kModule, "spin levels must lie in [1, N + 1] or be 0");
}

long dimension_budget() {
  if (const char* env = std::getenv("GL_MEM_BUDGET")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 4096;
}

void check_budget(const FiniteModel& fm, long budget) {
  const long d = fm.dims();
  if (d * d > budget)
    throw Error(ErrorKind::DimensionBudgetExceeded, kModule,
                "superoperator dimension " + std::to_string(d * d) + " exceeds budget " + std::to_string(budget));
}

FiniteOperators finite_operators(const FiniteModel& fm) {
  fm.validate();
  const int l = fm.levels(), nc = fm.fock_cutoff + 1, d = fm.dims(), n_atoms = fm.n_atoms;
  auto index = [&](int n, int k1, int k2) { return (n * l + k1) * l + k2; };
  std::vector<Triplet> ta, tp1, tp2, tz1, tz2;
  for (int n = 0; n < nc; ++n)
    for (int k1 = 0; k1 < l; ++k1)
      for (int k2 = 0; k2 < l; ++k2) {
        const int s = index(n, k1, k2);
        if (n > 0) ta.emplace_back(index(n - 1, k1, k2), s, std::sqrt(static_cast<double>(n)));
        if (k1 + 1 < l && k1 < n_atoms)
          tp1.emplace_back(index(n, k1 + 1, k2), s, std::sqrt(static_cast<double>((k1 + 1) * (n_atoms - k1))));
        if (k2 + 1 < l && k2 < n_atoms)
          tp2.emplace_back(index(n, k1, k2 + 1), s, std::sqrt(static_cast<double>((k2 + 1) * (n_atoms - k2))));
        tz1.emplace_back(s, s, k1 - 0.5 * n_atoms);
        tz2.emplace_back(s, s, k2 - 0.5 * n_atoms);
      }
  FiniteOperators ops;
  ops.a = from_triplets(d, ta);
  ops.jp1 = from_triplets(d, tp1);
  ops.jp2 = from_triplets(d, tp2);
  ops.jz1 = from_triplets(d, tz1);
  ops.jz2 = from_triplets(d, tz2);
  const ModelParams& p = fm.params;
  const double sq = std::sqrt(static_cast<double>(n_atoms));
  const SparseCMatrix ad = ops.a.adjoint();
  const SparseCMatrix x1 = ops.jp1 + SparseCMatrix(ops.jp1.adjoint());
  const SparseCMatrix x2 = ops.jp2 + SparseCMatrix(ops.jp2.adjoint());
  const SparseCMatrix q = ops.a + ad, qp = ops.a - ad;
  const SparseCMatrix xp = x1 + x2, xm = x1 - x2;
  SparseCMatrix h = cplx(p.omega) * SparseCMatrix(ad * ops.a) + cplx(p.omega0) * SparseCMatrix(ops.jz1 + ops.jz2) +
                    cplx(p.lambda_d / sq) * SparseCMatrix(q * xp) + (I * (p.lambda_s / sq)) * SparseCMatrix(qp * xm);
  h.prune(cplx(0.0));
  h.makeCompressed();
  ops.h = h;
  return ops;
}

CMatrix build_finite_liouvillian(const FiniteModel& fm) { return deform_with_counting_field(fm, 0.0); }

CMatrix deform_with_counting_field(const FiniteModel& fm, double chi) {
  fm.validate();
  check_budget(fm);
  return assemble_generator(fm, element_map(fm, -1), chi);
}

ParityBlock parity_block(const FiniteModel& fm, int sector, double chi, long budget) {
  fm.validate();
  check_budget(fm, budget);
  if (sector != 0 && sector != 1) throw Error(ErrorKind::InvalidArgument, kModule, "parity sector is 0 or 1");
  ElementMap em = element_map(fm, sector);
  ParityBlock b;
  b.generator = assemble_generator(fm, em, chi);
  b.elements = std::move(em.elements);
  return b;
}

std::vector<cplx> finite_spectrum(const FiniteModel& fm, long budget) {
  std::vector<cplx> out;
  for (int sector = 0; sector < 2; ++sector) {
    const ParityBlock b = parity_block(fm, sector, 0.0, budget);
    if (b.generator.rows() == 0) continue;
    const CVector ev = eigenvalues_complex(b.generator);
    out.insert(out.end(), ev.begin(), ev.end());
  }
  std::sort(out.begin(), out.end(), spectrum_before);
  return out;
}

CutoffConvergence converge_fock_cutoff(FiniteModel fm, double tol, long budget) {
  CutoffConvergence result;
  auto slowest = [](const std::vector<cplx>& all) {
    return std::vector<cplx>(all.begin(), all.begin() + static_cast<long>(std::min<std::size_t>(10, all.size())));
  };
  check_budget(fm, budget);
  std::vector<cplx> prev = finite_spectrum(fm, budget);
  result.fock_cutoff = fm.fock_cutoff;
  result.slowest = slowest(prev);
  while (true) {
    FiniteModel next = fm;
    next.fock_cutoff = std::max(1, 2 * fm.fock_cutoff);
    const long d = next.dims();
    if (d * d > budget) return result;
    std::vector<cplx> cur = finite_spectrum(next, budget);
    double move = 0.0;
    for (const cplx& c : slowest(cur)) {
      double best = std::numeric_limits<double>::infinity();
      for (const cplx& p : prev) best = std::min(best, std::abs(c - p));
      move = std::max(move, best);
    }
    fm = next;
    result.fock_cutoff = fm.fock_cutoff;
    result.slowest = slowest(cur);
    if (move < tol) {
      result.converged = true;
      return result;
    }
    prev = std::move(cur);
  }
}

std::vector<PerturbativeMode> perturbative_splitting(const FiniteModel& fm, const std::vector<Occupation>& modes) {
  const FiniteOperators ops = finite_operators(fm);
  const int top = std::min(fm.levels() - 1, fm.n_atoms);
  auto raise = [&](int plus, int minus) {
    CVector v = CVector::Zero(fm.dims());
    v[0] = 1.0;
    for (int q = 0; q < minus; ++q) v = ops.jp2 * v;
    for (int q = 0; q < plus; ++q) v = ops.jp1 * v;
    return v;
  };
  std::vector<PerturbativeMode> out;
  for (const auto& occ : modes) {
    for (int v : {occ.n_plus, occ.n_minus, occ.m_plus, occ.m_minus})
      if (v < 0 || v > top) throw Error(ErrorKind::InvalidArgument, kModule, "occupation outside the spin ladder");
    const CVector vn = raise(occ.n_plus, occ.n_minus);
    const CVector vm = raise(occ.m_plus, occ.m_minus);
    const double nn = vn.squaredNorm(), nm = vm.squaredNorm();
    PerturbativeMode mode;
    mode.occupation = occ;
    mode.normalization = nn * nm;
    if (!(mode.normalization > 1e-300)) {
      mode.degenerate = true;
      out.push_back(mode);
      continue;
    }
    const cplx hn = vn.dot(ops.h * vn);
    const cplx hm = vm.dot(ops.h * vm);
    mode.lambda1 = -I * (hn * nm - nn * hm) / mode.normalization;
    out.push_back(mode);
  }
  return out;
}

CMatrix stationary_state(const FiniteModel& fm) {
  const ParityBlock b = parity_block(fm, 0);
  const int d = fm.dims();
  CMatrix g = b.generator;
  CVector rhs = CVector::Zero(g.rows());
  int anchor = -1;
  for (std::size_t c = 0; c < b.elements.size(); ++c)
    if (b.elements[c].first == b.elements[c].second) {
      if (anchor < 0) anchor = static_cast<int>(c);
    }
  g.row(anchor).setZero();
  for (std::size_t c = 0; c < b.elements.size(); ++c)
    if (b.elements[c].first == b.elements[c].second) g(anchor, static_cast<Eigen::Index>(c)) = 1.0;
  rhs[anchor] = 1.0;
  const CVector x = g.partialPivLu().solve(rhs);
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t c = 0; c < b.elements.size(); ++c) rho(b.elements[c].first, b.elements[c].second) = x[static_cast<Eigen::Index>(c)];
  return 0.5 * (rho + rho.adjoint());
}

cplx leading_eigenvalue(const FiniteModel& fm, double chi) {
  const ParityBlock b = parity_block(fm, 0, chi);
  const Eigen::Index n = b.generator.rows();
  const double shift = 1e-9 * fm.params.frequency_scale();
  const Eigen::PartialPivLU<CMatrix> lu(b.generator - cplx(shift, 0.0) * CMatrix::Identity(n, n));
  CVector x = CVector::Zero(n);
  for (Eigen::Index c = 0; c < n; ++c)
    if (b.elements[static_cast<std::size_t>(c)].first == b.elements[static_cast<std::size_t>(c)].second) x[c] = 1.0;
  x.normalize();
  cplx lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    const CVector y = lu.solve(x);
    const cplx mu = x.dot(y);
    if (!std::isfinite(std::abs(mu)) || mu == cplx(0.0))
      throw Error(ErrorKind::NonConvergence, kModule, "inverse iteration broke down");
    const cplx next = shift + 1.0 / mu;
    x = y / y.norm();
    const bool done = it > 2 && std::abs(next - lambda) <= 1e-15 * fm.params.frequency_scale();
    lambda = next;
    if (done) return lambda;
  }
  throw Error(ErrorKind::NonConvergence, kModule, "leading eigenvalue did not converge");
}

double photon_current(const FiniteModel& fm, double h) {
  const cplx lp = leading_eigenvalue(fm, h);
  const cplx lm = leading_eigenvalue(fm, -h);
  return (I * (lp - lm) / (2.0 * h)).real();
}

CMatrix coherent_product_state(const FiniteModel& fm, cplx cavity_amplitude) {
  fm.validate();
  const int l = fm.levels(), d = fm.dims();
  CVector psi = CVector::Zero(d);
  cplx c = 1.0;
  for (int n = 0; n <= fm.fock_cutoff; ++n) {
    if (n > 0) c *= cavity_amplitude / std::sqrt(static_cast<double>(n));
    psi[n * l * l] = c;
  }
  psi.normalize();
  return psi * psi.adjoint();
}

cplx expectation(const CMatrix& rho, const SparseCMatrix& op) {
  cplx acc = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseCMatrix::InnerIterator it(op, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  return acc;
}

DensityTrajectory evolve_density(const FiniteModel& fm, const CMatrix& rho0, const std::vector<double>& times,
                                 double tol) {
  const FiniteOperators ops = finite_operators(fm);
  const int d = fm.dims();
  if (rho0.rows() != d || rho0.cols() != d) throw Error(ErrorKind::InvalidArgument, kModule, "density matrix shape mismatch");
  const double kappa = fm.params.kappa;
  SparseCMatrix g = cplx(0.0, -1.0) * ops.h - cplx(kappa, 0.0) * SparseCMatrix(ops.a.adjoint() * ops.a);
  g.makeCompressed();
  const SparseCMatrix gd = g.adjoint();
  const SparseCMatrix ad = ops.a.adjoint();
  OdeRhs rhs = [&](double, const CVector& y, CVector& dy) {
    dy.resize(y.size());
    Eigen::Map<const CMatrix> rho(y.data(), d, d);
    Eigen::Map<CMatrix> out(dy.data(), d, d);
    const CMatrix ar = ops.a * rho;
    out = g * rho;
    out += rho * gd;
    out += 2.0 * kappa * (ar * ad);
  };
  OdeOptions opt;
  opt.tol = tol;
  const double t_end = times.empty() ? 0.0 : times.back();
  CVector y0 = Eigen::Map<const CVector>(rho0.data(), static_cast<Eigen::Index>(d) * d);
  const Trajectory tr = integrate_ode(rhs, y0, 0.0, t_end, times, opt);
  DensityTrajectory out;
  out.times = tr.times;
  out.diverged = tr.diverged;
  for (const auto& y : tr.states) out.states.push_back(Eigen::Map<const CMatrix>(y.data(), d, d));
  return out;
}

}  // namespace cbec
