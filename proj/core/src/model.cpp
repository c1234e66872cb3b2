// model.cpp — model parameters, mean-field shift branches and quadratic generators
#include "cbec/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cbec/error.hpp"

namespace cbec {

namespace {

constexpr const char* kModule = "model";
constexpr cplx I{0.0, 1.0};

// f(B) = (B + B*)√(1 − |B|²) and its Wirtinger derivatives.
struct SpinProfile {
  double r = 1.0;  // √(1 − |B|²)
  double s = 0.0;  // B + B*
  double f = 0.0;
  cplx f_b{1.0};      // ∂f/∂B
  cplx f_bb{0.0};     // ∂²f/∂B²
  double f_bbc = 0.0; // ∂²f/∂B∂B*
};

SpinProfile spin_profile(cplx b) {
  SpinProfile out;
  const double n = std::norm(b);
  out.r = std::sqrt(std::max(0.0, 1.0 - n));
  out.s = 2.0 * b.real();
  out.f = out.s * out.r;
  const double r = out.r, r3 = r * r * r;
  const cplx bc = std::conj(b);
  out.f_b = r - out.s * bc / (2.0 * r);
  out.f_bb = -bc / r - out.s * bc * bc / (4.0 * r3);
  out.f_bbc = -out.s / r - out.s * n / (4.0 * r3);
  return out;
}

// Real couplings multiplying f₁ and f₂ in the scaled energy.
std::array<double, 2> spin_drives(const ModelParams& p, cplx a) {
  const double x = 2.0 * p.lambda_d * a.real();
  const double y = 2.0 * p.lambda_s * a.imag();
  return {x - y, x + y};
}

using Real6 = Eigen::Matrix<double, 6, 1>;
using Real6x6 = Eigen::Matrix<double, 6, 6>;

Real6 residual6(const ModelParams& p, const Real6& x) {
  const auto v = mean_field_velocity(p, {x[0], x[1]}, {x[2], x[3]}, {x[4], x[5]});
  Real6 out;
  for (int i = 0; i < 3; ++i) {
    out[2 * i] = v[i].real();
    out[2 * i + 1] = v[i].imag();
  }
  return out;
}

cplx cavity_response(const ModelParams& p, double f1, double f2) {
  return -I * (p.lambda_d * (f1 + f2) - I * p.lambda_s * (f1 - f2)) / cplx(p.kappa, p.omega);
}

// Real reduced equations with the cavity eliminated and condensate means real,
// each multiplied by √(1 − B_i²) to stay regular.
Eigen::Vector2d reduced_residual(const ModelParams& p, const Eigen::Vector2d& b) {
  const double r1 = std::sqrt(std::max(0.0, 1.0 - b[0] * b[0]));
  const double r2 = std::sqrt(std::max(0.0, 1.0 - b[1] * b[1]));
  const cplx a = cavity_response(p, 2.0 * b[0] * r1, 2.0 * b[1] * r2);
  const auto c = spin_drives(p, a);
  return {p.omega0 * b[0] * r1 + c[0] * (1.0 - 2.0 * b[0] * b[0]),
          p.omega0 * b[1] * r2 + c[1] * (1.0 - 2.0 * b[1] * b[1])};
}

bool reduced_newton(const ModelParams& p, Eigen::Vector2d& b, int max_iter) {
  const double scale = p.frequency_scale();
  const double limit = 1.0 - 1e-12;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::Vector2d r = reduced_residual(p, b);
    if (r.norm() <= 1e-13 * scale) return true;
    Eigen::Matrix2d jac;
    for (int j = 0; j < 2; ++j) {
      const double h = 1e-7;
      Eigen::Vector2d bp = b, bm = b;
      bp[j] = std::clamp(bp[j] + h, -limit, limit);
      bm[j] = std::clamp(bm[j] - h, -limit, limit);
      jac.col(j) = (reduced_residual(p, bp) - reduced_residual(p, bm)) / (bp[j] - bm[j]);
    }
    const Eigen::Vector2d step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) return false;
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      Eigen::Vector2d trial = b + t * step;
      trial[0] = std::clamp(trial[0], -limit, limit);
      trial[1] = std::clamp(trial[1], -limit, limit);
      if (reduced_residual(p, trial).norm() < r.norm()) {
        b = trial;
        improved = true;
        break;
      }
    }
    if (!improved) return r.norm() <= 1e-10 * scale;
  }
  return reduced_residual(p, b).norm() <= 1e-10 * scale;
}

bool full_newton(const ModelParams& p, Real6& x, int max_iter, double tol) {
  for (int it = 0; it < max_iter; ++it) {
    const Real6 r = residual6(p, x);
    if (!r.allFinite()) return false;
    if (r.norm() <= tol) return true;
    Real6x6 jac;
    for (int j = 0; j < 6; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
      Real6 xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      jac.col(j) = (residual6(p, xp) - residual6(p, xm)) / (2.0 * h);
    }
    const Real6 step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) return false;
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      const Real6 trial = x + t * step;
      const Real6 rt = residual6(p, trial);
      if (rt.allFinite() && rt.norm() < r.norm()) {
        x = trial;
        improved = true;
        break;
      }
    }
    if (!improved) return r.norm() <= tol;
  }
  return residual6(p, x).norm() <= tol;
}

}  // namespace

ModelParams ModelParams::from_polar(double v, double phi_deg, double omega, double omega0, double kappa,
                                    double n_atoms) {
  const double phi = phi_deg * std::numbers::pi / 180.0;
  ModelParams p;
  p.omega = omega;
  p.omega0 = omega0;
  p.lambda_d = v * std::cos(phi);
  p.lambda_s = v * std::sin(phi);
  p.kappa = kappa;
  p.n_atoms = n_atoms;
  return p;
}

double ModelParams::coupling_strength() const { return std::hypot(lambda_d, lambda_s); }

double ModelParams::coupling_angle_deg() const {
  return std::atan2(lambda_s, lambda_d) * 180.0 / std::numbers::pi;
}

double ModelParams::frequency_scale() const {
  return std::max({1.0, std::abs(omega), std::abs(omega0), std::abs(lambda_d), std::abs(lambda_s),
                   std::abs(kappa)});
}

void ModelParams::validate() const {
  const double vals[] = {omega, omega0, lambda_d, lambda_s, kappa, n_atoms};
  for (double v : vals)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, kModule, "parameters must be finite");
  if (kappa < 0.0) throw Error(ErrorKind::InvalidArgument, kModule, "kappa must be nonnegative");
  if (omega0 <= 0.0) throw Error(ErrorKind::InvalidArgument, kModule, "omega0 must be positive");
  if (n_atoms < 1.0) throw Error(ErrorKind::InvalidArgument, kModule, "n_atoms must be at least 1");
}

const char* to_string(BranchKind kind) { return kind == BranchKind::Normal ? "normal" : "superradiant"; }

MeanFieldBranch MeanFieldBranch::normal() { return MeanFieldBranch{}; }

MeanFieldBranch MeanFieldBranch::from_roots(cplx alpha, cplx root_beta1, cplx root_beta2) {
  MeanFieldBranch b;
  b.alpha = alpha;
  b.root_beta1 = root_beta1;
  b.root_beta2 = root_beta2;
  b.beta1 = root_beta1 * root_beta1;
  b.beta2 = root_beta2 * root_beta2;
  b.kind = b.shift_magnitude() > 1e-9 ? BranchKind::Superradiant : BranchKind::Normal;
  return b;
}

double MeanFieldBranch::shift_magnitude() const {
  return std::max({std::abs(alpha), std::abs(root_beta1), std::abs(root_beta2)});
}

QuadraticLiouvillian build_normal_liouvillian(const ModelParams& p) {
  p.validate();
  return build_superradiant_liouvillian(p, MeanFieldBranch::normal());
}

std::array<cplx, 3> mean_field_velocity(const ModelParams& p, cplx a, cplx b1, cplx b2) {
  const SpinProfile s1 = spin_profile(b1), s2 = spin_profile(b2);
  const auto c = spin_drives(p, a);
  const cplx e_a = p.omega * a + p.lambda_d * (s1.f + s2.f) - I * p.lambda_s * (s1.f - s2.f);
  const cplx e_b1 = p.omega0 * b1 + c[0] * std::conj(s1.f_b);
  const cplx e_b2 = p.omega0 * b2 + c[1] * std::conj(s2.f_b);
  return {-I * e_a - p.kappa * a, -I * e_b1, -I * e_b2};
}

double mean_field_energy(const ModelParams& p, cplx a, cplx b1, cplx b2) {
  const SpinProfile s1 = spin_profile(b1), s2 = spin_profile(b2);
  const cplx e = p.omega * std::norm(a) + p.omega0 * (std::norm(b1) + std::norm(b2)) +
                 p.lambda_d * 2.0 * a.real() * (s1.f + s2.f) +
                 I * p.lambda_s * (a - std::conj(a)) * (s1.f - s2.f);
  return e.real();
}

CVector linear_term(const ModelParams& p, const MeanFieldBranch& b) {
  const auto v = mean_field_velocity(p, b.alpha, -b.root_beta1, -b.root_beta2);
  CVector g(kPhaseSpace);
  for (int i = 0; i < 3; ++i) {
    g[i] = v[i];
    g[i + 3] = std::conj(v[i]);
  }
  return g;
}

QuadraticLiouvillian build_superradiant_liouvillian(const ModelParams& p, const MeanFieldBranch& b) {
  p.validate();
  const cplx a = b.alpha;
  const cplx bm[2] = {-b.root_beta1, -b.root_beta2};
  for (const auto& x : bm)
    if (!(std::norm(x) < 1.0))
      throw Error(ErrorKind::InvalidArgument, kModule, "branch lies outside the Bloch sphere");
  const SpinProfile s[2] = {spin_profile(bm[0]), spin_profile(bm[1])};
  const auto c = spin_drives(p, a);
  const cplx ld_m = p.lambda_d - I * p.lambda_s;
  const cplx ld_p = p.lambda_d + I * p.lambda_s;

  QuadraticLiouvillian l;
  l.branch = b;
  l.h = CMatrix::Zero(kModes, kModes);
  l.k = CMatrix::Zero(kModes, kModes);
  l.m = CMatrix::Zero(kModes, kModes);
  l.h(0, 0) = p.omega;
  l.h(0, 1) = ld_m * s[0].f_b;
  l.h(0, 2) = ld_p * s[1].f_b;
  l.h(1, 0) = std::conj(l.h(0, 1));
  l.h(2, 0) = std::conj(l.h(0, 2));
  l.h(1, 1) = p.omega0 + c[0] * s[0].f_bbc;
  l.h(2, 2) = p.omega0 + c[1] * s[1].f_bbc;
  l.k(0, 1) = l.k(1, 0) = 0.5 * ld_p * s[0].f_b;
  l.k(0, 2) = l.k(2, 0) = 0.5 * ld_m * s[1].f_b;
  l.k(1, 1) = 0.5 * c[0] * s[0].f_bb;
  l.k(2, 2) = 0.5 * c[1] * s[1].f_bb;
  l.m(0, 0) = p.kappa;
  l.g = linear_term(p, b);
  if (l.g.cwiseAbs().maxCoeff() > 1e-8 * p.frequency_scale())
    throw Error(ErrorKind::NonvanishingLinearTerm, kModule, "branch does not solve the shift equations");
  return l;
}

QuadraticLiouvillian build_liouvillian(const ModelParams& p, const MeanFieldBranch& b) {
  return b.kind == BranchKind::Normal ? build_normal_liouvillian(p) : build_superradiant_liouvillian(p, b);
}

std::vector<MeanFieldBranch> solve_shift_equations(const ModelParams& p, const ShiftSolverOptions& options) {
  p.validate();
  if (options.grid < 1 || options.max_seeds < 1)
    throw Error(ErrorKind::InvalidArgument, kModule, "seed grid must be positive");
  const double scale = p.frequency_scale();

  std::vector<Eigen::Vector2d> seeds;
  if (p.kappa == 0.0 && p.omega == 0.0) return {MeanFieldBranch::normal()};
  const double v2 = p.lambda_d * p.lambda_d + p.lambda_s * p.lambda_s;
  if (v2 > 0.0) {
    const double x = 1.0 - p.omega * p.omega0 / (8.0 * v2);
    if (x > 0.0) {
      const double bd = std::sqrt(x / 2.0);
      for (double s1 : {-1.0, 1.0})
        for (double s2 : {-1.0, 1.0}) seeds.emplace_back(s1 * bd, s2 * bd);
    }
  }
  const int n = std::max(1, std::min(options.grid, static_cast<int>(std::sqrt(std::max(0, options.max_seeds - static_cast<int>(seeds.size()))))));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
      const double w = n == 1 ? 0.5 : static_cast<double>(j) / (n - 1);
      seeds.emplace_back(-0.98 + 1.96 * u, -0.98 + 1.96 * w);
    }

  std::vector<MeanFieldBranch> found{MeanFieldBranch::normal()};
  auto merge = [&](const MeanFieldBranch& cand) {
    for (const auto& f : found) {
      const double d = std::max({std::abs(f.alpha - cand.alpha), std::abs(f.root_beta1 - cand.root_beta1),
                                 std::abs(f.root_beta2 - cand.root_beta2)});
      if (d <= options.merge_tol) return;
    }
    found.push_back(cand);
  };

  int converged = 0;
  for (auto seed : seeds) {
    if (!reduced_newton(p, seed, options.max_newton)) continue;
    const double r1 = std::sqrt(std::max(0.0, 1.0 - seed[0] * seed[0]));
    const double r2 = std::sqrt(std::max(0.0, 1.0 - seed[1] * seed[1]));
    if (r1 < 1e-6 || r2 < 1e-6) continue;
    const cplx a = cavity_response(p, 2.0 * seed[0] * r1, 2.0 * seed[1] * r2);
    Real6 x;
    x << a.real(), a.imag(), seed[0], 0.0, seed[1], 0.0;
    if (!full_newton(p, x, options.max_newton, options.residual_tol * scale)) continue;
    const cplx b1{x[2], x[3]}, b2{x[4], x[5]};
    if (!(std::norm(b1) < 1.0 - 1e-12 && std::norm(b2) < 1.0 - 1e-12)) continue;
    ++converged;
    const MeanFieldBranch cand = MeanFieldBranch::from_roots({x[0], x[1]}, -b1, -b2);
    if (cand.kind == BranchKind::Superradiant) merge(cand);
  }
  if (converged == 0)
    throw Error(ErrorKind::RootFindingFailure, kModule, "no seed converged to a stationary point");

  std::sort(found.begin() + 1, found.end(), [](const MeanFieldBranch& x, const MeanFieldBranch& y) {
    if (x.root_beta1.real() != y.root_beta1.real()) return x.root_beta1.real() < y.root_beta1.real();
    if (x.root_beta2.real() != y.root_beta2.real()) return x.root_beta2.real() < y.root_beta2.real();
    return lex_less(x.alpha, y.alpha);
  });
  return found;
}

std::vector<MeanFieldBranch> filter_physical_branches(const ModelParams& p, std::vector<MeanFieldBranch> branches) {
  std::vector<MeanFieldBranch> out;
  for (auto& b : branches) {
    const double bb1 = std::norm(b.beta1), bb2 = std::norm(b.beta2);
    const bool inside = std::abs(b.root_beta1) < 1.0 && std::abs(b.root_beta2) < 1.0;
    if (!inside || !(bb1 >= 0.0 && bb1 <= 2.0) || !(bb2 >= 0.0 && bb2 <= 2.0)) continue;
    if (!std::isfinite(std::abs(b.alpha))) continue;
    try {
      const QuadraticLiouvillian l = build_liouvillian(p, b);
      if ((l.h - l.h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * p.frequency_scale()) continue;
    } catch (const Error&) {
      continue;
    }
    b.physical = true;
    out.push_back(b);
  }
  return out;
}

}  // namespace cbec
