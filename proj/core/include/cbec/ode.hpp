// ode.hpp — adaptive Dormand–Prince 5(4) integrator with dense output
#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "cbec/linalg.hpp"

namespace cbec {

using OdeRhs = std::function<void(double t, const CVector& y, CVector& dydt)>;

enum class DivergenceReason { None, StepUnderflow, Overflow };

struct OdeOptions {
  double tol = 1e-9;  // relative and absolute local error per step
  double max_magnitude = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects automatically
  double max_step = 0.0;      // 0 means unbounded
  long max_steps = 50'000'000;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CVector> states;
  bool diverged = false;
  DivergenceReason reason = DivergenceReason::None;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

// Integrates y' = rhs(t, y) from t0 to t1, returning y at each requested
// sample time (ascending, within [t0, t1]). On step underflow or when
// |y| exceeds max_magnitude the partial trajectory is returned flagged diverged.
Trajectory integrate_ode(const OdeRhs& rhs, const CVector& y0, double t0, double t1,
                         const std::vector<double>& sample_times, const OdeOptions& options = {});

// Evenly spaced samples t0, t0+dt, ..., up to and including t1.
std::vector<double> sample_grid(double t0, double t1, double dt);

}  // namespace cbec
