// stability.cpp — one- and two-point stability, closed-system frequencies and phase sweeps
#include "cbec/stability.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <thread>

#include "cbec/error.hpp"
#include "cbec/moments.hpp"

namespace cbec {

namespace {

OnePointStability one_point_from(const CVector& ev) {
  OnePointStability s;
  s.max_re = -std::numeric_limits<double>::infinity();
  for (const auto& e : ev) {
    const double im = std::abs(e.imag());
    if (e.real() > s.max_re || (e.real() == s.max_re && im > s.im_at_max)) {
      s.max_re = e.real();
      s.im_at_max = im;
    }
  }
  return s;
}

double two_point_from(const CVector& ev) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    for (Eigen::Index j = i; j < ev.size(); ++j) best = std::max(best, (ev[i] + ev[j]).real());
  return best;
}

BranchStability evaluate_branch(const ModelParams& p, const MeanFieldBranch& b) {
  BranchStability bs;
  bs.branch = b;
  const CVector ev = eigenvalues_complex(drift_and_diffusion(build_liouvillian(p, b)).drift);
  bs.one_point = one_point_from(ev);
  bs.max_re_two_point = two_point_from(ev);
  return bs;
}

}  // namespace

OnePointStability one_point_stability(const CMatrix& drift) { return one_point_from(eigenvalues_complex(drift)); }

double two_point_stability(const CMatrix& drift) { return two_point_from(eigenvalues_complex(drift)); }

PolyCoeffs closed_polynomial(const ModelParams& p) {
  const double w = p.omega, w0 = p.omega0;
  const double d2 = p.lambda_d * p.lambda_d, s2 = p.lambda_s * p.lambda_s, v2 = d2 + s2;
  const double w02 = w0 * w0;
  PolyCoeffs poly;
  poly.coefficients = {
      w02 * (w * w0 - 2.0 * (9.0 * d2 + s2)) * (w * w0 - 2.0 * (d2 + 9.0 * s2)) / 64.0,
      (2.0 * w02 * (w * w - 6.0 * v2) - 20.0 * w * w0 * v2 + 36.0 * v2 * v2 + w02 * w02) / 16.0,
      (-12.0 * d2 - 12.0 * s2 + w * w + 2.0 * w02) / 4.0,
      1.0,
  };
  return poly;
}

std::array<cplx, 3> closed_frequencies(const ModelParams& p) {
  const auto roots = poly_roots(closed_polynomial(p));
  return {roots[0], roots[1], roots[2]};
}

std::array<cplx, 3> bogoliubov_frequencies(const std::array<cplx, 3>& f) {
  std::array<cplx, 3> nu{};
  for (int i = 0; i < 3; ++i) nu[i] = 2.0 * std::sqrt(-f[i]);
  return nu;
}

const char* to_string(ClosedPhase phase) {
  switch (phase) {
    case ClosedPhase::Normal: return "normal";
    case ClosedPhase::Superradiant: return "superradiant";
    case ClosedPhase::Inaccessible: return "inaccessible";
  }
  return "unknown";
}

bool closed_spectrum_is_real(const ModelParams& p, const MeanFieldBranch& b) {
  ModelParams closed = p;
  closed.kappa = 0.0;
  const CVector ev = eigenvalues_complex(drift_and_diffusion(build_liouvillian(closed, b)).drift);
  const double tol = 1e-7 * closed.frequency_scale();
  for (const auto& e : ev)
    if (std::abs(e.real()) > tol) return false;
  return true;
}

bool closed_cubic_is_physical(const ModelParams& p) {
  const double scale = p.frequency_scale();
  for (const auto& f : closed_frequencies(p))
    if (std::abs(f.imag()) > 1e-9 * scale * scale || !(f.real() < 0.0)) return false;
  return true;
}

ClosedPhase classify_closed_phase(const ModelParams& p, const ShiftSolverOptions& options, ClosedCriterion criterion) {
  ModelParams closed = p;
  closed.kappa = 0.0;
  const bool normal = criterion == ClosedCriterion::Exact ? closed_spectrum_is_real(closed, MeanFieldBranch::normal())
                                                          : closed_cubic_is_physical(closed);
  if (normal) return ClosedPhase::Normal;
  const auto branches = filter_physical_branches(closed, solve_shift_equations(closed, options));
  for (const auto& b : branches)
    if (b.kind == BranchKind::Superradiant && closed_spectrum_is_real(closed, b)) return ClosedPhase::Superradiant;
  return ClosedPhase::Inaccessible;
}

StabilityRecord analyse_point(const ModelParams& p, double phi_deg, const ShiftSolverOptions& options) {
  StabilityRecord rec;
  rec.phi_deg = phi_deg;
  rec.omega = p.omega;
  try {
    const auto branches = filter_physical_branches(p, solve_shift_equations(p, options));
    for (const auto& b : branches) {
      try {
        rec.branches.push_back(evaluate_branch(p, b));
      } catch (const Error&) {
        if (b.kind == BranchKind::Normal) throw;
      }
    }
    const BranchStability& normal = rec.branches.front();
    rec.normal_one_point = normal.one_point;
    rec.normal_two_point = normal.max_re_two_point;
    for (const auto& bs : rec.branches) {
      if (bs.branch.kind != BranchKind::Superradiant) continue;
      if (!rec.best_superradiant || bs.one_point.max_re < rec.best_superradiant->one_point.max_re ||
          (bs.one_point.max_re == rec.best_superradiant->one_point.max_re &&
           std::abs(bs.branch.alpha) < std::abs(rec.best_superradiant->branch.alpha)))
        rec.best_superradiant = bs;
    }
    const BranchStability* best = &normal;
    if (rec.best_superradiant && rec.best_superradiant->one_point.max_re < normal.one_point.max_re)
      best = &*rec.best_superradiant;
    rec.max_re_one_point = best->one_point.max_re;
    rec.im_at_max_one_point = best->one_point.im_at_max;
    rec.max_re_two_point = best->max_re_two_point;
    rec.branch_kind = best->branch.kind;
    rec.closed_phase = classify_closed_phase(p, options);
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

std::vector<StabilityRecord> sweep_phase_diagram(const SweepGrid& grid, const ModelParams& p_base, unsigned threads,
                                                 const ShiftSolverOptions& options) {
  if (grid.phi_steps < 2 || grid.omega_steps < 2)
    throw Error(ErrorKind::InvalidArgument, "stability-maps", "grid resolution must be at least 2 per axis");
  p_base.validate();
  const double v = p_base.coupling_strength();
  const std::size_t cells = static_cast<std::size_t>(grid.phi_steps) * grid.omega_steps;
  std::vector<StabilityRecord> out(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t idx = next++; idx < cells; idx = next++) {
      const int i = static_cast<int>(idx / grid.omega_steps);
      const int j = static_cast<int>(idx % grid.omega_steps);
      const double phi = grid.phi_min_deg + (grid.phi_max_deg - grid.phi_min_deg) * i / (grid.phi_steps - 1);
      const double omega = grid.omega_min + (grid.omega_max - grid.omega_min) * j / (grid.omega_steps - 1);
      ModelParams p = ModelParams::from_polar(v, phi, omega, p_base.omega0, p_base.kappa, p_base.n_atoms);
      out[idx] = analyse_point(p, phi, options);
    }
  };
  unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n = static_cast<unsigned>(std::min<std::size_t>(n, cells));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace cbec
