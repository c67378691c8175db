#pragma once

#include <cmath>
#include <vector>

#include <boost/math/constants/constants.hpp>

namespace tdelay {

double log_gamma(double x);
// gamma(a, z) = int_0^z t^{a-1} e^{-t} dt
double lower_incomplete_gamma(double a, double z);
double regularized_gamma_p(double a, double z);
double regularized_gamma_q(double a, double z);

// log K_nu(x) for x > 0. Temme series for x <= 2, Steed's continued fraction
// above, then upward recurrence on the ratio K_{nu+1}/K_nu.
double log_bessel_k(double nu, double x);
double bessel_k(double nu, double x);
// log K_{nu0 + k}(x), k = 0..count-1
std::vector<double> log_bessel_k_sequence(double nu0, int count, double x);

double bessel_i0(double x);

// log G(n) for the Barnes G-function at integer n >= 1.
double log_barnes_g(int n);

// U(1/2, c, z) = (2/sqrt(pi)) z^{1-c} int_0^inf (z + w^2)^{c-3/2} e^{-w^2} dw
double kummer_u_half(double c, double z);

// Number of trapezoid nodes on [0, pi] for integrands e^{x(cos t - 1)} times
// a trigonometric polynomial of degree `degree`; aliasing stays below e^{-80}.
inline int trapezoid_nodes(double x, int degree) {
  const int n = static_cast<int>(std::ceil(0.5 * (degree + 13.0 * std::sqrt(std::max(x, 0.0)) + 30.0))) + 1;
  return std::max(n, 16);
}

// e^{-x} I_m(x), m = 0..mmax, x >= 0.
template <class Real>
std::vector<Real> scaled_bessel_i_table(const Real& x, int mmax) {
  using std::cos;
  using std::exp;
  const Real pi = boost::math::constants::pi<Real>();
  const int n = trapezoid_nodes(static_cast<double>(x), mmax);
  std::vector<Real> out(static_cast<std::size_t>(mmax) + 1, Real(0));
  for (int k = 0; k <= n; ++k) {
    const Real t = pi * k / n;
    const Real c = cos(t);
    Real w = exp(x * (c - 1));
    if (k == 0 || k == n) w /= 2;
    Real cm_prev = 1, cm = c;
    out[0] += w;
    for (int m = 1; m <= mmax; ++m) {
      out[static_cast<std::size_t>(m)] += w * cm;
      const Real next = 2 * c * cm - cm_prev;
      cm_prev = cm;
      cm = next;
    }
  }
  for (auto& v : out) v /= n;
  return out;
}

// Taylor coefficients of I_0 at x0, scaled by e^{-x0}:
// e^{-x0} I_0^{(n)}(x0) / n!, n = 0..order, from
// (1/pi) int_0^pi e^{x0 (cos t - 1)} cos^n t dt / n!.
template <class Real>
std::vector<Real> scaled_i0_taylor(const Real& x0, int order) {
  using std::cos;
  using std::exp;
  const Real pi = boost::math::constants::pi<Real>();
  const int n = trapezoid_nodes(static_cast<double>(x0), order);
  std::vector<Real> out(static_cast<std::size_t>(order) + 1, Real(0));
  for (int k = 0; k <= n; ++k) {
    const Real t = pi * k / n;
    const Real c = cos(t);
    Real w = exp(x0 * (c - 1));
    if (k == 0 || k == n) w /= 2;
    Real p = 1;
    for (int m = 0; m <= order; ++m) {
      out[static_cast<std::size_t>(m)] += w * p;
      p *= c;
    }
  }
  Real fact = 1;
  for (int m = 0; m <= order; ++m) {
    if (m > 0) fact *= m;
    out[static_cast<std::size_t>(m)] /= (n * fact);
  }
  return out;
}

}  // namespace tdelay
