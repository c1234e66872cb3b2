// moments.hpp — Gaussian moment dynamics, spin observables and squeezing witness
#pragma once

#include <array>
#include <vector>

#include "cbec/linalg.hpp"
#include "cbec/model.hpp"
#include "cbec/ode.hpp"
#include "cbec/third_quantization.hpp"

namespace cbec {

struct MomentState {
  CVector first;   // ⟨v⟩ for v = (a, b1, b2, a†, b1†, b2†), fluctuations about the branch
  CMatrix second;  // ½⟨{v_r, v_s}⟩, symmetrically ordered raw second moments
  double time = 0.0;

  // Vacuum covariance for all modes with ⟨a⟩ = cavity_amplitude.
  static MomentState vacuum(cplx cavity_amplitude = 0.1);
  static MomentState zero();
  // Vacuum fluctuations for every mode except a cavity seeded with raw ⟨a⟩ and ⟨a²⟩.
  // ⟨a†a⟩ keeps its coherent value, so a_squared ≠ cavity_amplitude² need not be physical.
  static MomentState cavity_seed(cplx cavity_amplitude, cplx a_squared);
  // Builds raw moments from means and a symmetric central covariance.
  static MomentState gaussian(const CVector& first, const CMatrix& covariance);

  CMatrix covariance() const;  // central symmetric covariance
  double conjugation_defect() const;
};

// Vacuum plus a squeezed cavity with ⟨δa²⟩ = s and ⟨δa†δa⟩ = (√(1+4|s|²) − 1)/2.
MomentState squeezed_cavity_state(cplx cavity_amplitude, cplx s);

struct DriftDiffusion {
  CMatrix drift;      // A: d⟨v⟩/dt = A⟨v⟩
  CMatrix diffusion;  // D: dS/dt = AS + SAᵀ + D
};

DriftDiffusion drift_and_diffusion(const QuadraticLiouvillian& l);

struct MomentTrajectory {
  std::vector<MomentState> samples;
  bool diverged = false;
  DivergenceReason reason = DivergenceReason::None;
};

struct EvolveOptions {
  double tol = 1e-10;
  double overflow = 1e12;
};

MomentTrajectory evolve_moments(const DriftDiffusion& dd, const MomentState& init, double t_end,
                                double dt_sample, const EvolveOptions& options = {});

// Symmetric moments of the stationary Gaussian state from the Sylvester covariance.
MomentState stationary_moments(const SpectralData& sd);

struct SpinObservables {
  std::array<double, 2> jx{}, jy{}, jz{};
  double xx_connected = 0.0;  // Re⟨J_{x,+} J_{x,−}⟩_c
  double xy_connected = 0.0;  // Re⟨J_{x,+} J_{y,−}⟩_c
  std::array<double, 2> xi_y{};  // NaN when the denominator degenerates
};

// Linearized observable c₀ + √N·uᵀv of a collective spin component.
struct LinearObservable {
  double constant = 0.0;
  CVector coefficients;  // 6 entries over v, already scaled by √N
  double mean(const MomentState& ms) const;
};

enum class SpinComponent { X, Y };

LinearObservable spin_component(const ModelParams& p, const MeanFieldBranch& b, int condensate,
                                SpinComponent c);

// ⟨X₁X₂⟩ − ⟨X₁⟩⟨X₂⟩ evaluated from the central covariance.
cplx connected_correlator(const MomentState& ms, const LinearObservable& x1, const LinearObservable& x2);

SpinObservables spin_observables(const MomentState& ms, const ModelParams& p, const MeanFieldBranch& b);

// ξ_y = N(ΔJ_y)²/(⟨J_z²⟩ + ⟨J_x²⟩) per condensate. Throws DegenerateDenominator
// when a denominator falls below 1e-12·N².
std::array<double, 2> spin_squeezing_y(const MomentState& ms, const ModelParams& p,
                                       const MeanFieldBranch& b = MeanFieldBranch::normal());

// Cavity eliminated from the normal-branch drift: 4×4 over (b1, b2, b1†, b2†).
CMatrix adiabatic_eliminate(const ModelParams& p);

// Max minus min over the final third of a series.
double oscillation_amplitude(const std::vector<double>& values);

// Slope of log|x| against t by least squares.
double fit_growth_rate(const std::vector<double>& times, const std::vector<double>& values);

// Angular frequency ν in [f_min, f_max] whose sinusoid, fitted by least squares
// together with a linear trend, explains the most variance. Scanned on a grid
// and refined by golden-section search.
double dominant_frequency(const std::vector<double>& times, const std::vector<double>& values, double f_min,
                          double f_max, int resolution = 4000);

}  // namespace cbec
