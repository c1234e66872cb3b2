// support.hpp — shared helpers for the unit tests
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cbec/linalg.hpp"
#include "cbec/model.hpp"

namespace cbec::test {

inline ModelParams oscillating_phase() {
  ModelParams p;
  p.lambda_d = 6.3;
  p.lambda_s = 7.25;
  p.omega = 46.0;
  p.omega0 = 7.4;
  p.kappa = 1250.0;
  p.n_atoms = 2000.0;
  return p;
}

inline ModelParams stationary_phase() {
  ModelParams p = oscillating_phase();
  p.lambda_d = 9.6;
  p.lambda_s = 0.17;
  p.omega = 246.0;
  return p;
}

// Superradiant set whose most stable branch has a strictly Hurwitz drift.
inline ModelParams stable_superradiant() {
  ModelParams p;
  p.omega = 14.68;
  p.omega0 = 1.0;
  p.lambda_d = 3.52;
  p.lambda_s = 2.405;
  p.kappa = 6.578;
  p.n_atoms = 2000.0;
  return p;
}

// Greedy nearest-neighbour matching distance between two multisets of equal size.
inline double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const cplx& x : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](const cplx& u, const cplx& v) { return std::abs(u - x) < std::abs(v - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

inline std::vector<cplx> to_vector(const CVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace cbec::test
