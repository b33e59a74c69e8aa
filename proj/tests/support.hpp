#pragma once

// Independent reference computations shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using C = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Roots of x^2 + b x + c.
inline std::vector<C> quadratic_roots(C b, C c) {
  const C s = std::sqrt(b * b - 4.0 * c);
  return {(-b - s) / 2.0, (-b + s) / 2.0};
}

// Durand-Kerner on a monic polynomial, coefficients from the highest power down
// (leading 1 omitted).
inline std::vector<C> poly_roots(const std::vector<C>& coef) {
  const std::size_t n = coef.size();
  std::vector<C> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(C(0.4, 0.9), static_cast<double>(i));
  auto p = [&](C x) {
    C acc = 1.0;
    for (const C& a : coef) acc = acc * x + a;
    return acc;
  };
  for (int it = 0; it < 500; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      C den = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) den *= z[i] - z[j];
      }
      z[i] -= p(z[i]) / den;
    }
  }
  return z;
}

// Characteristic polynomial coefficients of a 3x3 matrix (monic, leading 1 omitted).
inline std::vector<C> charpoly3(const Eigen::MatrixXcd& a) {
  const C tr = a.trace();
  const C m2 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2) -
               a(1, 2) * a(2, 1);
  return {-tr, m2, -a.determinant()};
}

// Largest distance from any point of `a` to its nearest point of `b`, both ways.
inline double set_distance(const std::vector<C>& a, const std::vector<C>& b) {
  auto one = [](const std::vector<C>& x, const std::vector<C>& y) {
    double worst = 0;
    for (const C& p : x) {
      double best = 1e300;
      for (const C& q : y) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one(a, b), one(b, a));
}

// Winding number of a sampled closed curve about w, counted by signed crossings of the
// ray going right from w.
inline int ray_crossings(const std::vector<C>& loop, C w) {
  int wn = 0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const C a = loop[i] - w, b = loop[(i + 1) % loop.size()] - w;
    if (a.imag() <= 0 && b.imag() > 0) {
      if (a.real() * b.imag() - a.imag() * b.real() > 0) ++wn;
    } else if (a.imag() > 0 && b.imag() <= 0) {
      if (a.real() * b.imag() - a.imag() * b.real() < 0) --wn;
    }
  }
  return wn;
}

inline Eigen::MatrixXcd random_matrix(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = C(g(rng), g(rng));
  }
  return m;
}

// Time-ordered propagation of i dpsi/dt = H(t) psi with fourth-order Magnus steps and
// exact matrix exponentials.
template <class HamiltonianAt>
Eigen::VectorXcd magnus_propagate(HamiltonianAt&& ham, double duration, Eigen::VectorXcd psi, int steps) {
  const double h = duration / steps;
  const double c1 = 0.5 - std::sqrt(3.0) / 6, c2 = 0.5 + std::sqrt(3.0) / 6;
  const C mi(0, -1);
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const Eigen::MatrixXcd a1 = mi * ham(t + c1 * h), a2 = mi * ham(t + c2 * h);
    const Eigen::MatrixXcd omega = 0.5 * h * (a1 + a2) + (std::sqrt(3.0) / 12) * h * h * (a2 * a1 - a1 * a2);
    psi = omega.exp() * psi;
  }
  return psi;
}

}  // namespace oracle
