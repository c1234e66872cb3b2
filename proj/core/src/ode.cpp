// ode.cpp — adaptive Dormand–Prince 5(4) integrator with dense output
#include "cbec/ode.hpp"

#include <algorithm>
#include <cmath>

#include "cbec/error.hpp"

namespace cbec {

namespace {

const double a21 = 0.2, a31 = 3.0 / 40.0, a32 = 9.0 / 40.0, a41 = 44.0 / 45.0,
             a42 = -56.0 / 15.0, a43 = 32.0 / 9.0, a51 = 19372.0 / 6561.0,
             a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0,
             a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
             a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0, a71 = 35.0 / 384.0,
             a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
             a76 = 11.0 / 84.0;
const double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
const double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
             d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
             d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
const double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
             e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

double error_norm(const CVector& err, const CVector& y0, const CVector& y1, double tol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = tol + tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / std::max<Eigen::Index>(1, err.size()));
}

double initial_step(const OdeRhs& rhs, double t0, const CVector& y0, const CVector& f0,
                    double span, double tol) {
  auto scaled = [&](const CVector& v) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double r = std::abs(v[i]) / (tol + tol * std::abs(y0[i]));
      acc += r * r;
    }
    return std::sqrt(acc / std::max<Eigen::Index>(1, v.size()));
  };
  const double d0 = scaled(y0), d1n = scaled(f0);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, span);
  CVector y1 = y0 + h0 * f0, f1(y0.size());
  rhs(t0 + h0, y1, f1);
  const double d2 = scaled(f1 - f0) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, span});
}

bool finite(const CVector& y) { return y.allFinite(); }

}  // namespace

std::vector<double> sample_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !(t1 >= t0)) throw Error(ErrorKind::InvalidArgument, "linalg", "invalid sample grid");
  const long n = static_cast<long>(std::floor((t1 - t0) / dt + 1e-9));
  std::vector<double> out;
  out.reserve(n + 2);
  for (long k = 0; k <= n; ++k) out.push_back(t0 + k * dt);
  if (t1 - out.back() > 1e-9 * dt) out.push_back(t1);
  return out;
}

Trajectory integrate_ode(const OdeRhs& rhs, const CVector& y0, double t0, double t1,
                         const std::vector<double>& sample_times, const OdeOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "linalg", "tolerance must be positive");
  if (!(t1 >= t0)) throw Error(ErrorKind::InvalidArgument, "linalg", "time span must be ascending");
  if (!std::is_sorted(sample_times.begin(), sample_times.end()))
    throw Error(ErrorKind::InvalidArgument, "linalg", "sample times must be ascending");
  if (!finite(y0)) throw Error(ErrorKind::InvalidArgument, "linalg", "initial state is not finite");

  Trajectory out;
  const double span = t1 - t0;
  std::size_t next = 0;
  while (next < sample_times.size() && sample_times[next] < t0) ++next;
  auto emit_until = [&](double t_hi, auto&& eval) {
    while (next < sample_times.size() && sample_times[next] <= t_hi && sample_times[next] <= t1) {
      out.times.push_back(sample_times[next]);
      out.states.push_back(eval(sample_times[next]));
      ++next;
    }
  };
  emit_until(t0, [&](double) { return y0; });
  if (span == 0.0) return out;

  const Eigen::Index n = y0.size();
  CVector y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), tmp(n);
  rhs(t0, y, k1);
  double h = options.initial_step > 0.0 ? options.initial_step : initial_step(rhs, t0, y, k1, span, options.tol);
  const double hmax = options.max_step > 0.0 ? options.max_step : span;
  h = std::min(h, hmax);
  double t = t0;
  const double h_floor = 1e-14 * span;
  bool last_rejected = false;

  while (t < t1) {
    if (out.steps_accepted + out.steps_rejected >= options.max_steps) {
      out.diverged = true;
      out.reason = DivergenceReason::StepUnderflow;
      return out;
    }
    if (t + h > t1) h = t1 - t;
    if (h < h_floor && t1 - t > h_floor) {
      out.diverged = true;
      out.reason = DivergenceReason::StepUnderflow;
      return out;
    }
    tmp = y + h * a21 * k1;
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, ynew, k7);

    double err = std::numeric_limits<double>::infinity();
    if (finite(ynew) && finite(k7)) {
      CVector e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      err = error_norm(e, y, ynew, options.tol);
    }
    if (err <= 1.0) {
      const CVector ydiff = ynew - y;
      const CVector bspl = h * k1 - ydiff;
      const CVector r4 = ydiff - h * k7 - bspl;
      const CVector r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      const double t_old = t, h_old = h;
      const CVector y_old = y;
      emit_until(t + h, [&](double ts) -> CVector {
        const double th = (ts - t_old) / h_old, th1 = 1.0 - th;
        return y_old + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5)));
      });
      t = (t + h >= t1 || t1 - (t + h) < h_floor) ? t1 : t + h;
      y = ynew;
      k1 = k7;
      ++out.steps_accepted;
      if (y.cwiseAbs().maxCoeff() > options.max_magnitude) {
        out.diverged = true;
        out.reason = DivergenceReason::Overflow;
        return out;
      }
      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 10.0;
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
      h = std::min(h * fac, hmax);
      last_rejected = false;
    } else {
      ++out.steps_rejected;
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.1;
      h *= fac;
      last_rejected = true;
    }
  }
  emit_until(t1, [&](double) { return y; });
  return out;
}

}  // namespace cbec
