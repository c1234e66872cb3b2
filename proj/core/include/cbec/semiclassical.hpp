// semiclassical.hpp — factorized mean-field equations for cavity and collective spins
#pragma once

#include "cbec/linalg.hpp"
#include "cbec/model.hpp"
#include "cbec/ode.hpp"

namespace cbec {

// α = ⟨a⟩/√N, β_i = ⟨J₋,i⟩/N, w_i = ⟨J_z,i⟩/N.
struct SemiclassicalState {
  cplx alpha{0.0};
  cplx beta1{0.0}, beta2{0.0};
  double w1 = -0.5, w2 = -0.5;

  CVector pack() const;
  static SemiclassicalState unpack(const CVector& y);
};

// Printed: the λ_S term of β̇₁ carries w₂. Corrected: it carries w₁, which
// conserves w_i² + |β_i|².
enum class SemiclassicalVariant { Printed, Corrected };

SemiclassicalState semiclassical_rhs(const SemiclassicalState& s, const ModelParams& p,
                                     SemiclassicalVariant variant = SemiclassicalVariant::Corrected);

struct SemiclassicalTrajectory {
  std::vector<double> times;
  std::vector<SemiclassicalState> states;
  bool diverged = false;
};

SemiclassicalTrajectory integrate_semiclassical(const ModelParams& p, const SemiclassicalState& init,
                                                double t_end, double dt_sample,
                                                SemiclassicalVariant variant = SemiclassicalVariant::Corrected,
                                                double tol = 1e-10);

}  // namespace cbec
