// moments.cpp — Gaussian moment dynamics, spin observables and squeezing witness
#include "cbec/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cbec/error.hpp"

namespace cbec {

namespace {

constexpr const char* kModule = "moments-dynamics";
constexpr cplx I{0.0, 1.0};

CMatrix exchange_half() {
  CMatrix j = CMatrix::Zero(kPhaseSpace, kPhaseSpace);
  for (int i = 0; i < kModes; ++i) j(i, i + kModes) = j(i + kModes, i) = 0.5;
  return j;
}

CVector pack(const MomentState& s) {
  CVector y(kPhaseSpace + kPhaseSpace * kPhaseSpace);
  y.head(kPhaseSpace) = s.first;
  y.tail(kPhaseSpace * kPhaseSpace) = Eigen::Map<const CVector>(s.second.data(), kPhaseSpace * kPhaseSpace);
  return y;
}

MomentState unpack(const CVector& y, double t) {
  MomentState s;
  s.first = y.head(kPhaseSpace);
  s.second = Eigen::Map<const CMatrix>(y.tail(kPhaseSpace * kPhaseSpace).data(), kPhaseSpace, kPhaseSpace);
  s.time = t;
  return s;
}

struct SpinLinearization {
  cplx b;      // scaled condensate mean B
  double r;    // √(1 − |B|²)
  cplx j0;     // J₊/N at the branch
  cplx j_b;    // ∂(J₊/N)/∂B
  cplx j_bc;   // ∂(J₊/N)/∂B*
};

SpinLinearization linearize(const MeanFieldBranch& branch, int condensate) {
  SpinLinearization s;
  s.b = condensate == 0 ? -branch.root_beta1 : -branch.root_beta2;
  const double n = std::norm(s.b);
  s.r = std::sqrt(std::max(0.0, 1.0 - n));
  const cplx bc = std::conj(s.b);
  s.j0 = bc * s.r;
  s.j_b = -bc * bc / (2.0 * s.r);
  s.j_bc = s.r - n / (2.0 * s.r);
  return s;
}

struct JzMoments {
  double mean;
  double second;  // ⟨J_z²⟩
};

JzMoments jz_moments(const MomentState& ms, const ModelParams& p, const MeanFieldBranch& branch,
                     int condensate) {
  const int m = condensate + 1;
  const double n_atoms = p.n_atoms, sq = std::sqrt(n_atoms);
  const SpinLinearization lin = linearize(branch, condensate);
  const CMatrix cov = ms.covariance();
  const cplx mu = ms.first[m];
  const double n_fl = (cov(m, m + kModes) - 0.5).real();
  const cplx s_fl = cov(m, m);
  const double mean = n_atoms * (std::norm(lin.b) - 0.5) +
                      sq * 2.0 * (std::conj(lin.b) * mu).real() + std::norm(mu) + n_fl;
  CVector w = CVector::Zero(kPhaseSpace);
  w[m] = sq * std::conj(lin.b) + std::conj(mu);
  w[m + kModes] = sq * lin.b + mu;
  const double var_lin = (w.transpose() * cov * w).value().real();
  const double var_quad = n_fl * n_fl + std::norm(s_fl) + n_fl;
  return {mean, mean * mean + var_lin + var_quad};
}

}  // namespace

MomentState MomentState::vacuum(cplx cavity_amplitude) {
  CVector first = CVector::Zero(kPhaseSpace);
  first[0] = cavity_amplitude;
  first[kModes] = std::conj(cavity_amplitude);
  return gaussian(first, exchange_half());
}

MomentState MomentState::zero() {
  MomentState s;
  s.first = CVector::Zero(kPhaseSpace);
  s.second = CMatrix::Zero(kPhaseSpace, kPhaseSpace);
  return s;
}

MomentState MomentState::gaussian(const CVector& first, const CMatrix& covariance) {
  MomentState s;
  s.first = first;
  s.second = covariance + first * first.transpose();
  return s;
}

CMatrix MomentState::covariance() const { return second - first * first.transpose(); }

double MomentState::conjugation_defect() const {
  double d = 0.0;
  for (int i = 0; i < kModes; ++i) d = std::max(d, std::abs(first[i + kModes] - std::conj(first[i])));
  for (int i = 0; i < kPhaseSpace; ++i)
    for (int j = 0; j < kPhaseSpace; ++j) {
      const int ic = (i + kModes) % kPhaseSpace, jc = (j + kModes) % kPhaseSpace;
      d = std::max(d, std::abs(second(ic, jc) - std::conj(second(i, j))));
    }
  return d;
}

MomentState MomentState::cavity_seed(cplx cavity_amplitude, cplx a_squared) {
  MomentState m = squeezed_cavity_state(cavity_amplitude, 0.0);
  CMatrix cov = m.covariance();
  const cplx s = a_squared - cavity_amplitude * cavity_amplitude;
  cov(0, 0) = s;
  cov(kModes, kModes) = std::conj(s);
  return gaussian(m.first, cov);
}

MomentState squeezed_cavity_state(cplx cavity_amplitude, cplx s) {
  CVector first = CVector::Zero(kPhaseSpace);
  first[0] = cavity_amplitude;
  first[kModes] = std::conj(cavity_amplitude);
  CMatrix cov = exchange_half();
  const double n = 0.5 * (std::sqrt(1.0 + 4.0 * std::norm(s)) - 1.0);
  cov(0, 0) = s;
  cov(kModes, kModes) = std::conj(s);
  cov(0, kModes) = cov(kModes, 0) = n + 0.5;
  return MomentState::gaussian(first, cov);
}

DriftDiffusion drift_and_diffusion(const QuadraticLiouvillian& l) {
  const StructureMatrices s = assemble_structure(l);
  DriftDiffusion dd;
  dd.drift = -2.0 * s.x.transpose();
  dd.diffusion = CMatrix::Zero(kPhaseSpace, kPhaseSpace);
  for (int i = 0; i < kModes; ++i)
    for (int j = 0; j < kModes; ++j) {
      const cplx v = 0.5 * (l.m(i, j) + std::conj(l.m(j, i)));
      dd.diffusion(i, j + kModes) += 0.5 * v;
      dd.diffusion(j + kModes, i) += 0.5 * v;
      dd.diffusion(j, i + kModes) += 0.5 * std::conj(v);
      dd.diffusion(i + kModes, j) += 0.5 * std::conj(v);
    }
  return dd;
}

MomentTrajectory evolve_moments(const DriftDiffusion& dd, const MomentState& init, double t_end,
                                double dt_sample, const EvolveOptions& options) {
  if (init.first.size() != kPhaseSpace || init.second.rows() != kPhaseSpace || init.second.cols() != kPhaseSpace)
    throw Error(ErrorKind::InvalidArgument, kModule, "moment state must be 6-dimensional");
  if (init.conjugation_defect() > 1e-9 * std::max(1.0, max_abs(init.second)))
    throw Error(ErrorKind::InvalidArgument, kModule, "initial moments violate conjugation symmetry");
  const CMatrix a = dd.drift, at = dd.drift.transpose(), d = dd.diffusion;
  OdeRhs rhs = [&](double, const CVector& y, CVector& dy) {
    dy.resize(y.size());
    dy.head(kPhaseSpace) = a * y.head(kPhaseSpace);
    Eigen::Map<const CMatrix> s(y.tail(kPhaseSpace * kPhaseSpace).data(), kPhaseSpace, kPhaseSpace);
    Eigen::Map<CMatrix> ds(dy.tail(kPhaseSpace * kPhaseSpace).data(), kPhaseSpace, kPhaseSpace);
    ds.noalias() = a * s;
    ds.noalias() += s * at;
    ds += d;
  };
  OdeOptions opt;
  opt.tol = options.tol;
  opt.max_magnitude = options.overflow;
  const double t0 = init.time;
  const Trajectory tr = integrate_ode(rhs, pack(init), t0, t0 + t_end, sample_grid(t0, t0 + t_end, dt_sample), opt);
  MomentTrajectory out;
  out.diverged = tr.diverged;
  out.reason = tr.reason;
  out.samples.reserve(tr.states.size());
  for (std::size_t k = 0; k < tr.states.size(); ++k) out.samples.push_back(unpack(tr.states[k], tr.times[k]));
  return out;
}

MomentState stationary_moments(const SpectralData& sd) {
  if (!sd.covariance)
    throw Error(ErrorKind::SingularPencil, kModule, "no stationary covariance for this generator");
  MomentState s;
  s.first = CVector::Zero(kPhaseSpace);
  s.second = *sd.covariance + exchange_half();
  return s;
}

double LinearObservable::mean(const MomentState& ms) const {
  return constant + (coefficients.transpose() * ms.first).value().real();
}

LinearObservable spin_component(const ModelParams& p, const MeanFieldBranch& b, int condensate, SpinComponent c) {
  if (condensate < 0 || condensate > 1) throw Error(ErrorKind::InvalidArgument, kModule, "condensate index is 0 or 1");
  const SpinLinearization lin = linearize(b, condensate);
  const int m = condensate + 1;
  const double sq = std::sqrt(p.n_atoms);
  LinearObservable o;
  o.coefficients = CVector::Zero(kPhaseSpace);
  if (c == SpinComponent::X) {
    o.constant = p.n_atoms * lin.j0.real();
    o.coefficients[m] = sq * 0.5 * (lin.j_b + std::conj(lin.j_bc));
    o.coefficients[m + kModes] = sq * 0.5 * (lin.j_bc + std::conj(lin.j_b));
  } else {
    o.constant = p.n_atoms * lin.j0.imag();
    o.coefficients[m] = sq * (lin.j_b - std::conj(lin.j_bc)) / (2.0 * I);
    o.coefficients[m + kModes] = sq * (lin.j_bc - std::conj(lin.j_b)) / (2.0 * I);
  }
  return o;
}

cplx connected_correlator(const MomentState& ms, const LinearObservable& x1, const LinearObservable& x2) {
  return (x1.coefficients.transpose() * ms.covariance() * x2.coefficients).value();
}

std::array<double, 2> spin_squeezing_y(const MomentState& ms, const ModelParams& p, const MeanFieldBranch& b) {
  std::array<double, 2> xi{};
  const CMatrix cov = ms.covariance();
  for (int i = 0; i < 2; ++i) {
    const LinearObservable x = spin_component(p, b, i, SpinComponent::X);
    const LinearObservable y = spin_component(p, b, i, SpinComponent::Y);
    const double var_y = (y.coefficients.transpose() * cov * y.coefficients).value().real();
    const double mx = x.mean(ms);
    const double x2 = mx * mx + (x.coefficients.transpose() * cov * x.coefficients).value().real();
    const JzMoments z = jz_moments(ms, p, b, i);
    const double denom = z.second + x2;
    if (!(denom >= 1e-12 * p.n_atoms * p.n_atoms))
      throw Error(ErrorKind::DegenerateDenominator, kModule, "squeezing denominator vanishes");
    xi[i] = p.n_atoms * var_y / denom;
  }
  return xi;
}

SpinObservables spin_observables(const MomentState& ms, const ModelParams& p, const MeanFieldBranch& b) {
  SpinObservables out;
  LinearObservable xs[2], ys[2];
  for (int i = 0; i < 2; ++i) {
    xs[i] = spin_component(p, b, i, SpinComponent::X);
    ys[i] = spin_component(p, b, i, SpinComponent::Y);
    out.jx[i] = xs[i].mean(ms);
    out.jy[i] = ys[i].mean(ms);
    out.jz[i] = jz_moments(ms, p, b, i).mean;
  }
  out.xx_connected = connected_correlator(ms, xs[0], xs[1]).real();
  out.xy_connected = connected_correlator(ms, xs[0], ys[1]).real();
  try {
    out.xi_y = spin_squeezing_y(ms, p, b);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateDenominator) throw;
    out.xi_y = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  }
  return out;
}

CMatrix adiabatic_eliminate(const ModelParams& p) {
  const CMatrix a = drift_and_diffusion(build_normal_liouvillian(p)).drift;
  const int c[2] = {0, kModes};
  const int s[4] = {1, 2, 1 + kModes, 2 + kModes};
  CMatrix acc(2, 2), acs(2, 4), asc(4, 2), ass(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) acc(i, j) = a(c[i], c[j]);
    for (int j = 0; j < 4; ++j) acs(i, j) = a(c[i], s[j]);
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 2; ++j) asc(i, j) = a(s[i], c[j]);
    for (int j = 0; j < 4; ++j) ass(i, j) = a(s[i], s[j]);
  }
  if (std::abs(acc.determinant()) == 0.0)
    throw Error(ErrorKind::InvalidArgument, kModule, "cavity block is singular; elimination needs kappa or omega nonzero");
  return ass - asc * acc.partialPivLu().solve(acs);
}

double oscillation_amplitude(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const std::size_t start = values.size() - std::max<std::size_t>(1, values.size() / 3);
  const auto [lo, hi] = std::minmax_element(values.begin() + static_cast<long>(start), values.end());
  return *hi - *lo;
}

double fit_growth_rate(const std::vector<double>& times, const std::vector<double>& values) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  for (std::size_t k = 0; k < times.size() && k < values.size(); ++k) {
    const double v = std::abs(values[k]);
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    const double y = std::log(v);
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double den = n * stt - st * st;
  return den == 0.0 ? 0.0 : (n * sty - st * sy) / den;
}

double dominant_frequency(const std::vector<double>& times, const std::vector<double>& values, double f_min,
                          double f_max, int resolution) {
  const std::size_t n = std::min(times.size(), values.size());
  if (n < 6 || !(f_max > f_min) || resolution < 2) return 0.0;
  const double t0 = times.front(), span = std::max(times[n - 1] - t0, 1e-300);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  Eigen::MatrixXd base(static_cast<Eigen::Index>(n), 2);
  for (std::size_t k = 0; k < n; ++k) {
    y[static_cast<Eigen::Index>(k)] = values[k];
    base(static_cast<Eigen::Index>(k), 0) = 1.0;
    base(static_cast<Eigen::Index>(k), 1) = (times[k] - t0) / span;
  }
  const double rss_trend = (y - base * base.colPivHouseholderQr().solve(y)).squaredNorm();
  auto explained = [&](double f) {
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 4);
    design.leftCols(2) = base;
    for (std::size_t k = 0; k < n; ++k) {
      design(static_cast<Eigen::Index>(k), 2) = std::cos(f * (times[k] - t0));
      design(static_cast<Eigen::Index>(k), 3) = std::sin(f * (times[k] - t0));
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
    return rss_trend - (y - design * coef).squaredNorm();
  };
  const double step = (f_max - f_min) / (resolution - 1);
  double best_f = f_min, best_p = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < resolution; ++i) {
    const double f = f_min + i * step;
    const double pw = explained(f);
    if (pw > best_p) {
      best_p = pw;
      best_f = f;
    }
  }
  double lo = std::max(f_min, best_f - step), hi = std::min(f_max, best_f + step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (explained(m1) > explained(m2)) hi = m2;
    else lo = m1;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cbec
