// test_model.cpp — parameters, shift branches and quadratic generators
#include <doctest.h>

#include <functional>

#include "cbec/error.hpp"
#include "cbec/finite_size.hpp"
#include "cbec/model.hpp"
#include "cbec/moments.hpp"
#include "support.hpp"

using namespace cbec;

namespace {

constexpr cplx I{0.0, 1.0};

const MeanFieldBranch* first_superradiant(const std::vector<MeanFieldBranch>& br) {
  for (const auto& b : br)
    if (b.kind == BranchKind::Superradiant) return &b;
  return nullptr;
}

// Real Hessian of f over six real coordinates by central differences.
Eigen::Matrix<double, 6, 6> real_hessian(const std::function<double(const Eigen::Matrix<double, 6, 1>&)>& f,
                                         const Eigen::Matrix<double, 6, 1>& x0, double h) {
  Eigen::Matrix<double, 6, 6> out;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      auto at = [&](double si, double sj) {
        Eigen::Matrix<double, 6, 1> x = x0;
        x[i] += si * h;
        x[j] += sj * h;
        return f(x);
      };
      out(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
    }
  return out;
}

// Pattern search minimum of g over the square [−1, 1]².
Eigen::Vector2d minimize_2d(const std::function<double(double, double)>& g) {
  Eigen::Vector2d best(0.0, 0.0);
  double fb = g(0.0, 0.0);
  for (int i = -200; i <= 200; ++i)
    for (int j = -200; j <= 200; ++j) {
      const double x = 0.995 * i / 200.0, y = 0.995 * j / 200.0;
      const double v = g(x, y);
      if (v < fb) {
        fb = v;
        best = {x, y};
      }
    }
  for (double step = 1e-2; step > 1e-13; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (const Eigen::Vector2d d : {Eigen::Vector2d(step, 0), Eigen::Vector2d(-step, 0), Eigen::Vector2d(0, step),
                                      Eigen::Vector2d(0, -step)}) {
        const Eigen::Vector2d c = best + d;
        if (std::abs(c[0]) >= 1.0 || std::abs(c[1]) >= 1.0) continue;
        const double v = g(c[0], c[1]);
        if (v < fb) {
          fb = v;
          best = c;
          moved = true;
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("polar parametrisation") {
  const ModelParams p = ModelParams::from_polar(2.0, 30.0, 5.0, 1.0, 3.0, 10.0);
  CHECK(p.lambda_d == doctest::Approx(std::sqrt(3.0)));
  CHECK(p.lambda_s == doctest::Approx(1.0));
  CHECK(p.coupling_strength() == doctest::Approx(2.0));
  CHECK(p.coupling_angle_deg() == doctest::Approx(30.0));
  CHECK(p.frequency_scale() == doctest::Approx(5.0));
}

TEST_CASE("invalid parameters are rejected") {
  ModelParams p;
  p.kappa = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.kappa = 1.0;
  p.omega0 = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.omega0 = 1.0;
  p.omega = NAN;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("decoupled normal generator is diagonal") {
  ModelParams p;
  p.omega = 3.0;
  p.omega0 = 1.5;
  p.kappa = 2.0;
  const auto l = build_normal_liouvillian(p);
  CMatrix h = CMatrix::Zero(3, 3);
  h.diagonal() << 3.0, 1.5, 1.5;
  CHECK((l.h - h).norm() < 1e-15);
  CHECK(l.k.norm() < 1e-15);
  CHECK(std::abs(l.m(0, 0) - 2.0) < 1e-15);
  CHECK(l.m.norm() == doctest::Approx(2.0));
}

TEST_CASE("normal generator coefficients match the finite-model operator algebra") {
  ModelParams p;
  p.omega = 1.3;
  p.omega0 = 0.7;
  p.lambda_d = 0.9;
  p.lambda_s = 0.4;
  const auto l = build_normal_liouvillian(p);
  CHECK(std::abs(l.h(0, 1) - cplx(0.9, -0.4)) < 1e-15);
  CHECK(std::abs(l.h(0, 2) - cplx(0.9, 0.4)) < 1e-15);

  FiniteModel fm;
  fm.params = p;
  fm.n_atoms = 7;
  fm.fock_cutoff = 2;
  const FiniteOperators ops = finite_operators(fm);
  const CMatrix h = CMatrix(ops.h);
  const int lv = fm.levels();
  auto idx = [&](int n, int k1, int k2) { return (n * lv + k1) * lv + k2; };
  // ⟨f|H|i⟩ between single excitations gives the coefficient of the corresponding bilinear.
  CHECK(std::abs(h(idx(1, 0, 0), idx(0, 1, 0)) - l.h(0, 1)) < 1e-12);
  CHECK(std::abs(h(idx(1, 0, 0), idx(0, 0, 1)) - l.h(0, 2)) < 1e-12);
  CHECK(std::abs(h(idx(0, 1, 0), idx(0, 1, 0)) - h(0, 0) - l.h(1, 1)) < 1e-12);
  CHECK(std::abs(h(idx(1, 0, 0), idx(1, 0, 0)) - h(0, 0) - l.h(0, 0)) < 1e-12);
  // Coefficient of a†b_i† is the conjugate of the a b_i coefficient k_ab + k_ba.
  CHECK(std::abs(h(idx(1, 1, 0), idx(0, 0, 0)) - std::conj(l.k(0, 1) + l.k(1, 0))) < 1e-12);
  CHECK(std::abs(h(idx(1, 0, 1), idx(0, 0, 0)) - std::conj(l.k(0, 2) + l.k(2, 0))) < 1e-12);
}

TEST_CASE("generator invariants at the oscillating-phase parameters") {
  const ModelParams p = test::oscillating_phase();
  const auto l = build_normal_liouvillian(p);
  CHECK((l.h - l.h.adjoint()).norm() < 1e-14);
  CHECK((l.k - l.k.transpose()).norm() < 1e-14);
}

TEST_CASE("the trivial branch is always present") {
  for (double phi : {0.0, 30.0, 90.0}) {
    const auto br = solve_shift_equations(ModelParams::from_polar(121.65, phi, 100.0, 7.4, 1250.0));
    REQUIRE(!br.empty());
    CHECK(br.front().kind == BranchKind::Normal);
    CHECK(br.front().shift_magnitude() == 0.0);
  }
}

TEST_CASE("shifts vanish at very large cavity loss") {
  const auto br = solve_shift_equations(ModelParams::from_polar(121.65, 45.0, 100.0, 7.4, 1e6));
  REQUIRE(br.size() == 1);
  CHECK(br.front().kind == BranchKind::Normal);
}

TEST_CASE("Dicke-limit branch matches a direct minimisation of the mean-field energy") {
  const ModelParams p = ModelParams::from_polar(121.65, 0.0, 200.0, 7.4, 1250.0);
  const double g = p.lambda_d * p.lambda_d * p.omega / (p.kappa * p.kappa + p.omega * p.omega);
  // Cavity eliminated at its stationary value for real spin shifts.
  auto energy = [&](double b1, double b2) {
    const double f = 2.0 * b1 * std::sqrt(1.0 - b1 * b1) + 2.0 * b2 * std::sqrt(1.0 - b2 * b2);
    return p.omega0 * (b1 * b1 + b2 * b2) - g * f * f;
  };
  const Eigen::Vector2d m = minimize_2d(energy);
  REQUIRE(std::abs(m[0]) > 0.1);
  const auto br = filter_physical_branches(p, solve_shift_equations(p));
  bool matched = false;
  for (const auto& b : br) {
    if (b.kind != BranchKind::Superradiant) continue;
    if (std::abs(std::abs(b.root_beta1) - std::abs(m[0])) < 1e-6 && std::abs(std::abs(b.root_beta2) - std::abs(m[1])) < 1e-6)
      matched = true;
  }
  CHECK(matched);
}

TEST_CASE("physical filter keeps the normal branch and drops points outside the Bloch sphere") {
  const ModelParams p = ModelParams::from_polar(1.0, 45.0, 2.0, 1.0, 1.0);
  std::vector<MeanFieldBranch> in{MeanFieldBranch::normal(), MeanFieldBranch::from_roots(0.0, std::sqrt(3.0), 0.0)};
  const auto out = filter_physical_branches(p, in);
  REQUIRE(out.size() == 1);
  CHECK(out.front().kind == BranchKind::Normal);
  CHECK(out.front().physical);
}

TEST_CASE("superradiant branches exist on the stability-map parameter plane") {
  int found = 0;
  for (double phi : {10.0, 30.0, 50.0, 70.0})
    for (double omega : {50.0, 150.0, 300.0, 500.0}) {
      const auto br = filter_physical_branches(ModelParams::from_polar(121.65, phi, omega, 7.4, 1250.0),
                                               solve_shift_equations(ModelParams::from_polar(121.65, phi, omega, 7.4, 1250.0)));
      if (first_superradiant(br)) ++found;
    }
  CHECK(found > 0);
}

TEST_CASE("superradiant builder on the normal branch reproduces the normal generator") {
  const ModelParams p = test::oscillating_phase();
  const auto a = build_normal_liouvillian(p);
  const auto b = build_superradiant_liouvillian(p, MeanFieldBranch::normal());
  CHECK((a.h - b.h).norm() == 0.0);
  CHECK((a.k - b.k).norm() == 0.0);
  CHECK((a.m - b.m).norm() == 0.0);
}

TEST_CASE("non-stationary shifts are rejected") {
  const ModelParams p = test::oscillating_phase();
  CHECK_THROWS_AS(build_superradiant_liouvillian(p, MeanFieldBranch::from_roots(0.3, 0.2, 0.1)), Error);
}

TEST_CASE("superradiant generator against the finite-difference Hessian of the energy") {
  const ModelParams p = ModelParams::from_polar(121.65, 40.0, 150.0, 7.4, 1250.0);
  const auto br = filter_physical_branches(p, solve_shift_equations(p));
  const MeanFieldBranch* sr = first_superradiant(br);
  REQUIRE(sr != nullptr);
  const auto l = build_superradiant_liouvillian(p, *sr);
  CHECK((l.h - l.h.adjoint()).norm() < 1e-12 * l.h.norm());
  CHECK((l.k - l.k.transpose()).norm() < 1e-12 * l.k.norm());
  CHECK(std::abs(l.k(1, 1)) > 1e-3);
  CHECK(std::abs(l.k(2, 2)) > 1e-3);

  const cplx z0[3] = {sr->alpha, -sr->root_beta1, -sr->root_beta2};
  Eigen::Matrix<double, 6, 1> x0;
  for (int i = 0; i < 3; ++i) {
    x0[i] = z0[i].real();
    x0[i + 3] = z0[i].imag();
  }
  auto e = [&](const Eigen::Matrix<double, 6, 1>& x) {
    return mean_field_energy(p, cplx(x[0], x[3]), cplx(x[1], x[4]), cplx(x[2], x[5]));
  };
  const auto hr = real_hessian(e, x0, 1e-4);
  // Wirtinger: ∂z* = ½(∂x + i∂y), ∂z = ½(∂x − i∂y).
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const cplx h_ij = 0.25 * (hr(i, j) + hr(i + 3, j + 3) + I * (hr(i + 3, j) - hr(i, j + 3)));
      const cplx k_ij = 0.125 * (hr(i, j) - hr(i + 3, j + 3) - I * (hr(i + 3, j) + hr(i, j + 3)));
      worst = std::max({worst, std::abs(h_ij - l.h(i, j)), std::abs(k_ij - l.k(i, j))});
    }
  CHECK(worst < 1e-5 * l.h.norm());
}

TEST_CASE("drift matches the linearised mean-field velocity") {
  const ModelParams p = ModelParams::from_polar(121.65, 40.0, 150.0, 7.4, 1250.0);
  const auto br = filter_physical_branches(p, solve_shift_equations(p));
  for (const auto& b : br) {
    const CMatrix drift = drift_and_diffusion(build_liouvillian(p, b)).drift;
    const cplx z0[3] = {b.alpha, -b.root_beta1, -b.root_beta2};
    const double h = 1e-6;
    CMatrix jac = CMatrix::Zero(6, 6);
    for (int j = 0; j < 3; ++j) {
      auto vel = [&](cplx dz) {
        cplx z[3] = {z0[0], z0[1], z0[2]};
        z[j] += dz;
        return mean_field_velocity(p, z[0], z[1], z[2]);
      };
      const auto xp = vel(h), xm = vel(-h), yp = vel(cplx(0, h)), ym = vel(cplx(0, -h));
      for (int i = 0; i < 3; ++i) {
        const cplx dx = (xp[i] - xm[i]) / (2.0 * h), dy = (yp[i] - ym[i]) / (2.0 * h);
        jac(i, j) = 0.5 * (dx - I * dy);
        jac(i, j + 3) = 0.5 * (dx + I * dy);
        jac(i + 3, j + 3) = std::conj(jac(i, j));
        jac(i + 3, j) = std::conj(jac(i, j + 3));
      }
    }
    CHECK((jac - drift).cwiseAbs().maxCoeff() < 1e-6 * p.frequency_scale());
  }
}

TEST_CASE("linear term vanishes on every solved branch") {
  const ModelParams p = ModelParams::from_polar(121.65, 20.0, 300.0, 7.4, 1250.0);
  for (const auto& b : solve_shift_equations(p))
    CHECK(linear_term(p, b).cwiseAbs().maxCoeff() < 1e-8 * p.frequency_scale());
}
