// test_moments.cpp — Gaussian moment dynamics, observables and squeezing
#include <doctest.h>

#include "cbec/error.hpp"
#include "cbec/moments.hpp"
#include "cbec/stability.hpp"
#include "support.hpp"

using namespace cbec;

namespace {

constexpr cplx I{0.0, 1.0};

std::vector<double> series(const MomentTrajectory& tr, const std::function<double(const MomentState&)>& f) {
  std::vector<double> out;
  for (const auto& s : tr.samples) out.push_back(f(s));
  return out;
}

std::vector<double> times_of(const MomentTrajectory& tr) {
  std::vector<double> out;
  for (const auto& s : tr.samples) out.push_back(s.time);
  return out;
}

double min_xi(const ModelParams& p, const DriftDiffusion& dd, cplx a_squared) {
  const auto tr = evolve_moments(dd, MomentState::cavity_seed(0.1, a_squared), 1.0, 0.0005);
  double m = INFINITY;
  for (const auto& s : tr.samples) {
    const auto xi = spin_squeezing_y(s, p);
    m = std::min({m, xi[0], xi[1]});
  }
  return m;
}

}  // namespace

TEST_CASE("decoupled evolution damps the cavity and preserves condensate amplitudes") {
  ModelParams p;
  p.omega = 3.0;
  p.omega0 = 1.2;
  p.kappa = 0.8;
  const auto dd = drift_and_diffusion(build_normal_liouvillian(p));
  CHECK(dd.drift.block(0, 1, 1, 2).norm() == 0.0);
  CHECK(dd.drift.block(1, 0, 2, 1).norm() == 0.0);
  MomentState init = MomentState::vacuum(1.0);
  init.first[1] = 0.5;
  init.first[4] = 0.5;
  const auto tr = evolve_moments(dd, init, 2.0, 0.5);
  for (const auto& s : tr.samples) {
    CHECK(std::abs(s.first[0]) == doctest::Approx(std::exp(-p.kappa * s.time)).epsilon(1e-8));
    CHECK(std::abs(s.first[1]) == doctest::Approx(0.5).epsilon(1e-8));
  }
}

TEST_CASE("drift eigenvalues are the single-excitation lattice values") {
  for (const auto& p : {test::oscillating_phase(), test::stationary_phase(), ModelParams::from_polar(3.0, 20.0, 5.0, 1.0, 2.0)}) {
    const auto l = build_normal_liouvillian(p);
    const CVector rap = spectral_data(l).rapidities;
    std::vector<cplx> lattice;
    for (int i = 0; i < rap.size(); ++i) lattice.push_back(-2.0 * rap[i]);
    CHECK(test::multiset_distance(test::to_vector(eigenvalues_complex(drift_and_diffusion(l).drift)), lattice) <
          1e-9 * p.frequency_scale());
  }
}

TEST_CASE("adiabatic elimination of the cavity") {
  ModelParams p;
  p.omega = 100.0;
  p.omega0 = 1.0;
  p.kappa = 1000.0;
  SUBCASE("decoupled condensates precess freely") {
    const CMatrix r = adiabatic_eliminate(p);
    CMatrix d = CMatrix::Zero(4, 4);
    d.diagonal() << -I, -I, I, I;
    CHECK((r - d).norm() < 1e-14);
  }
  SUBCASE("decay rates follow 2V²/κ and the exact slow drift eigenvalues") {
    const ModelParams q = ModelParams::from_polar(std::sqrt(13.0), 45.0, 100.0, 1.0, 1000.0);
    const CVector r = eigenvalues_complex(adiabatic_eliminate(q));
    const double law = 2.0 * 13.0 / 1000.0;
    for (int i = 0; i < 4; ++i) CHECK(std::abs(r[i].real()) == doctest::Approx(law).epsilon(0.1));
    std::vector<cplx> slow;
    for (const cplx& e : test::to_vector(eigenvalues_complex(drift_and_diffusion(build_normal_liouvillian(q)).drift)))
      if (std::abs(e.real()) < 1.0) slow.push_back(e);
    CHECK(test::multiset_distance(test::to_vector(r), slow) < 0.01 * law);
  }
  SUBCASE("reduced one-point dynamics tracks the full model") {
    const ModelParams q = test::stationary_phase();
    const CMatrix red = adiabatic_eliminate(q);
    MomentState init = MomentState::vacuum(0.0);
    init.first[1] = init.first[4] = 0.1;
    const auto full = evolve_moments(drift_and_diffusion(build_normal_liouvillian(q)), init, 1.0, 0.001);
    CVector y0(4);
    y0 << 0.1, 0.0, 0.1, 0.0;
    const auto times = sample_grid(0.0, 1.0, 0.001);
    const auto tr = integrate_ode([&](double, const CVector& y, CVector& d) { d = red * y; }, y0, 0.0, 1.0, times);
    REQUIRE(tr.states.size() == full.samples.size());
    double diff = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      for (int m = 0; m < 2; ++m) diff = std::max(diff, std::abs(tr.states[i][m] - full.samples[i].first[1 + m]));
      peak = std::max(peak, std::abs(full.samples[i].first[1]));
    }
    CHECK(diff < 0.05 * peak);
  }
}

TEST_CASE("all-zero moments remain zero") {
  const auto tr = evolve_moments(drift_and_diffusion(build_normal_liouvillian(ModelParams::from_polar(1.0, 30.0, 2.0, 1.0, 0.0))),
                                 MomentState::zero(), 5.0, 1.0);
  for (const auto& s : tr.samples) {
    CHECK(s.first.norm() == 0.0);
    CHECK(s.second.norm() == 0.0);
  }
}

TEST_CASE("initial moments must be conjugation symmetric") {
  MomentState bad = MomentState::vacuum(0.0);
  bad.first[0] = 1.0;
  CHECK_THROWS_AS(evolve_moments(drift_and_diffusion(build_normal_liouvillian(test::oscillating_phase())), bad, 1.0, 0.1), Error);
}

TEST_CASE("unstable dynamics is flagged at the overflow threshold") {
  EvolveOptions opt;
  opt.overflow = 1e3;
  const auto tr = evolve_moments(drift_and_diffusion(build_normal_liouvillian(test::oscillating_phase())), MomentState::vacuum(0.1),
                                 200.0, 0.1, opt);
  CHECK(tr.diverged);
  CHECK(tr.reason == DivergenceReason::Overflow);
  CHECK(!tr.samples.empty());
}

TEST_CASE("vacuum observables on the normal branch") {
  const ModelParams p = test::oscillating_phase();
  const auto obs = spin_observables(MomentState::vacuum(0.0), p, MeanFieldBranch::normal());
  for (int i = 0; i < 2; ++i) {
    CHECK(obs.jz[i] == doctest::Approx(-0.5 * p.n_atoms));
    CHECK(std::abs(obs.jx[i]) < 1e-12);
    CHECK(std::abs(obs.jy[i]) < 1e-12);
    CHECK(obs.xi_y[i] == doctest::Approx(p.n_atoms / (p.n_atoms + 1.0)).epsilon(1e-12));
  }
  CHECK(std::abs(obs.xx_connected) < 1e-12);
  CHECK(std::abs(obs.xy_connected) < 1e-12);
}

TEST_CASE("squeezing witness tends to one for large atom numbers") {
  ModelParams p = test::oscillating_phase();
  p.n_atoms = 1e9;
  const auto xi = spin_squeezing_y(MomentState::vacuum(0.0), p);
  CHECK(xi[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("factorized Gaussian states have no cross correlations") {
  CVector first = CVector::Zero(6);
  first << 0.2, cplx(0.3, 0.1), cplx(-0.4, 0.2), 0.2, cplx(0.3, -0.1), cplx(-0.4, -0.2);
  const MomentState s = MomentState::gaussian(first, MomentState::vacuum(0.0).covariance());
  const auto obs = spin_observables(s, test::oscillating_phase(), MeanFieldBranch::normal());
  CHECK(std::abs(obs.jx[0]) > 1.0);
  CHECK(std::abs(obs.xx_connected) < 1e-12);
  CHECK(std::abs(obs.xy_connected) < 1e-12);
}

TEST_CASE("connected correlator agrees with a raw-moment evaluation") {
  const ModelParams p = test::oscillating_phase();
  const auto tr = evolve_moments(drift_and_diffusion(build_normal_liouvillian(p)), MomentState::vacuum(0.5), 0.3, 0.1);
  const MomentState& s = tr.samples.back();
  const auto x1 = spin_component(p, MeanFieldBranch::normal(), 0, SpinComponent::X);
  const auto x2 = spin_component(p, MeanFieldBranch::normal(), 1, SpinComponent::Y);
  // ⟨X₁X₂⟩ from raw symmetric moments, minus the product of the means.
  const cplx raw = x1.constant * x2.constant + x1.constant * (x2.coefficients.transpose() * s.first)(0) +
                   x2.constant * (x1.coefficients.transpose() * s.first)(0) +
                   (x1.coefficients.transpose() * s.second * x2.coefficients)(0);
  const cplx expect = raw - x1.mean(s) * x2.mean(s);
  CHECK(std::abs(connected_correlator(s, x1, x2) - expect) < 1e-9 * std::max(1.0, std::abs(expect)));
  CHECK(std::abs(expect) > 1e-6);
}

TEST_CASE("one-point oscillations in the unstable phase sit near the Zeeman splitting") {
  const ModelParams p = test::oscillating_phase();
  const auto tr = evolve_moments(drift_and_diffusion(build_normal_liouvillian(p)), MomentState::vacuum(0.1), 1.0, 0.001);
  const auto jx = series(tr, [&](const MomentState& s) { return spin_observables(s, p, MeanFieldBranch::normal()).jx[0]; });
  CHECK(dominant_frequency(times_of(tr), jx, 1.0, 40.0) == doctest::Approx(p.omega0).epsilon(0.2));
  for (const auto& s : tr.samples)
    CHECK(spin_observables(s, p, MeanFieldBranch::normal()).jz[0] == doctest::Approx(-0.5 * p.n_atoms).epsilon(0.01));
}

TEST_CASE("cross correlators keep oscillating while one-point functions are stationary") {
  const ModelParams p = test::stationary_phase();
  const auto dd = drift_and_diffusion(build_normal_liouvillian(p));
  CHECK(one_point_stability(dd.drift).max_re <= 1e-10 * dd.drift.norm());
  const auto tr = evolve_moments(dd, MomentState::vacuum(0.1), 1.0, 0.001);
  const auto xx = series(tr, [&](const MomentState& s) { return spin_observables(s, p, MeanFieldBranch::normal()).xx_connected; });
  const std::size_t third = xx.size() / 3;
  const std::vector<double> head(xx.begin(), xx.begin() + third);
  CHECK(oscillation_amplitude(xx) > 0.5 * oscillation_amplitude(head));
  CHECK(oscillation_amplitude(xx) > 1e-3);
  for (const auto& s : tr.samples)
    CHECK(spin_observables(s, p, MeanFieldBranch::normal()).jz[1] == doctest::Approx(-0.5 * p.n_atoms).epsilon(0.01));
}

TEST_CASE("seeded cavity pairing lowers the minimum squeezing witness monotonically") {
  const ModelParams p = test::stationary_phase();
  const auto dd = drift_and_diffusion(build_normal_liouvillian(p));
  double previous = INFINITY;
  for (double s : {0.0, -4.0, -16.0, -64.0, -256.0}) {
    const double m = min_xi(p, dd, s);
    CHECK(m < previous);
    previous = m;
  }
  CHECK(previous < 0.95);
}

TEST_CASE("long-time moments converge to the Sylvester covariance") {
  const ModelParams p = test::stable_superradiant();
  bool seen = false;
  for (const auto& b : filter_physical_branches(p, solve_shift_equations(p))) {
    const auto l = build_liouvillian(p, b);
    const auto sd = spectral_data(l);
    if (!sd.stable()) continue;
    seen = true;
    const auto dd = drift_and_diffusion(l);
    const double rate = -one_point_stability(dd.drift).max_re;
    const auto tr = evolve_moments(dd, MomentState::vacuum(0.1), 30.0 / rate, 1.0);
    const MomentState target = stationary_moments(sd);
    CHECK(max_abs(tr.samples.back().second - target.second) < 1e-6);
    CHECK(tr.samples.back().first.norm() < 1e-6);
    break;
  }
  CHECK(seen);
}

TEST_CASE("signal analysis helpers") {
  std::vector<double> t, x, g;
  for (int i = 0; i <= 2000; ++i) {
    const double ti = 0.001 * i;
    t.push_back(ti);
    x.push_back(0.3 + 2.0 * ti + std::cos(23.0 * ti + 0.4));
    g.push_back(1.5 * std::exp(0.3 * ti));
  }
  CHECK(dominant_frequency(t, x, 1.0, 100.0) == doctest::Approx(23.0).epsilon(1e-3));
  CHECK(fit_growth_rate(t, g) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(oscillation_amplitude({5.0, 0.0, 0.0, 0.0, 1.0, -1.0}) == doctest::Approx(2.0));
}
