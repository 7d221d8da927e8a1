#pragma once

// Independent reference computations used by the test suites. Everything in
// here deliberately avoids the library's own solution paths: roots via
// Durand-Kerner iteration, derivatives via finite differences, optima via
// exhaustive search.

#include <platoonlab/polynomial.hpp>

#include <algorithm>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

/// Durand-Kerner (Weierstrass) simultaneous root iteration.
inline std::vector<std::complex<double>> durand_kerner(const platoonlab::RealPolynomial& p,
                                                       int max_iter = 500) {
  const int d = p.degree();
  const double lead = p[d];
  std::vector<std::complex<double>> z(static_cast<std::size_t>(d));
  const std::complex<double> seed(0.4, 0.9); // standard non-real seed
  std::complex<double> acc(1.0, 0.0);
  for (int k = 0; k < d; ++k) {
    acc *= seed;
    z[static_cast<std::size_t>(k)] = acc;
  }
  for (int it = 0; it < max_iter; ++it) {
    double shift = 0.0;
    for (int k = 0; k < d; ++k) {
      std::complex<double> denom = lead;
      for (int j = 0; j < d; ++j)
        if (j != k) denom *= z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(j)];
      const std::complex<double> delta = p.eval(z[static_cast<std::size_t>(k)]) / denom;
      z[static_cast<std::size_t>(k)] -= delta;
      shift = std::max(shift, std::abs(delta));
    }
    if (shift < 1e-14) break;
  }
  return z;
}

/// Greedy multiset matching; returns the largest pairing distance.
inline double multiset_distance(std::vector<std::complex<double>> a,
                                std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& ra : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double dist = std::abs(ra - b[j]);
      if (dist < best) {
        best = dist;
        best_j = j;
      }
    }
    worst = std::max(worst, best);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(best_j));
  }
  return worst;
}

/// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace oracles
