// semiclassical.cpp — factorized mean-field equations for cavity and collective spins
#include "cbec/semiclassical.hpp"

namespace cbec {

namespace {
constexpr cplx I{0.0, 1.0};
}

CVector SemiclassicalState::pack() const {
  CVector y(5);
  y << alpha, beta1, beta2, cplx(w1, 0.0), cplx(w2, 0.0);
  return y;
}

SemiclassicalState SemiclassicalState::unpack(const CVector& y) {
  SemiclassicalState s;
  s.alpha = y[0];
  s.beta1 = y[1];
  s.beta2 = y[2];
  s.w1 = y[3].real();
  s.w2 = y[4].real();
  return s;
}

SemiclassicalState semiclassical_rhs(const SemiclassicalState& s, const ModelParams& p, SemiclassicalVariant variant) {
  const cplx a = s.alpha, ac = std::conj(a);
  const cplx b1 = s.beta1, b1c = std::conj(b1), b2 = s.beta2, b2c = std::conj(b2);
  const double ld = p.lambda_d, ls = p.lambda_s;
  const double w_in_b1 = variant == SemiclassicalVariant::Printed ? s.w2 : s.w1;
  SemiclassicalState d;
  d.alpha = a * cplx(-p.kappa, -p.omega) - I * ld * (b1c + b2c + b1 + b2) + ls * (b1c - b2c + b1 - b2);
  d.w1 = (-ls * (ac - a) * (b1 - b1c) + I * ld * (ac + a) * (b1 - b1c)).real();
  d.w2 = (ls * (ac - a) * (b2 - b2c) + I * ld * (ac + a) * (b2 - b2c)).real();
  d.beta1 = 2.0 * I * ld * s.w1 * (ac + a) - 2.0 * ls * w_in_b1 * (ac - a) - I * p.omega0 * b1;
  d.beta2 = 2.0 * I * ld * s.w2 * (ac + a) + 2.0 * ls * s.w2 * (ac - a) - I * p.omega0 * b2;
  return d;
}

SemiclassicalTrajectory integrate_semiclassical(const ModelParams& p, const SemiclassicalState& init, double t_end,
                                                double dt_sample, SemiclassicalVariant variant, double tol) {
  OdeRhs rhs = [&](double, const CVector& y, CVector& dy) {
    dy = semiclassical_rhs(SemiclassicalState::unpack(y), p, variant).pack();
  };
  OdeOptions opt;
  opt.tol = tol;
  opt.max_magnitude = 1e12;
  const Trajectory tr = integrate_ode(rhs, init.pack(), 0.0, t_end, sample_grid(0.0, t_end, dt_sample), opt);
  SemiclassicalTrajectory out;
  out.times = tr.times;
  out.diverged = tr.diverged;
  for (const auto& y : tr.states) out.states.push_back(SemiclassicalState::unpack(y));
  return out;
}

}  // namespace cbec
