// Proper-time marginal density for beta = 2 at arbitrary coupling:
//   P(tau) = 1/(N tau) sum_{n<N} (F_n dB_n/dtau - B_n dF_n/dtau),
//   B_n = (1/n!) (-d/dg)^n [I_0(sqrt(g^2-1)/tau) e^{-g/tau}] at g = gbar.
// B is expanded as a bivariate Taylor series in (g - gbar, tau - tau0), with
// I_0(sqrt(y) w) rewritten as J(y w^2), J(z) = I_0(sqrt z), which is entire in
// z and so also covers gbar = 1.

#include <cmath>
#include <string>
#include <vector>

#include "tdelay/errors.hpp"
#include "tdelay/oracles.hpp"
#include "tdelay/series.hpp"
#include "tdelay/special.hpp"

namespace tdelay {

namespace {

// e^{-sqrt(z0)} J^{(k)}(z0)/k!, k = 0..order
template <class Real>
std::vector<Real> scaled_j_taylor(const Real& z0, int order) {
  using std::exp;
  using std::sqrt;
  const Real x0 = sqrt(z0);
  std::vector<Real> out(static_cast<std::size_t>(order) + 1);
  if (x0 <= 40) {
    const Real q = z0 / 4;
    const Real eps = std::numeric_limits<Real>::epsilon();
    Real kfact = 1;  // k!
    Real four_k = 1;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) {
        kfact *= k;
        four_k *= 4;
      }
      // sum_l q^l / (l! (l+k)!)
      Real term = Real(1) / kfact;
      Real sum = term;
      for (int l = 0; l < 100000; ++l) {
        term *= q / ((l + 1) * (l + k + 1));
        sum += term;
        if (term < eps * sum) break;
      }
      out[static_cast<std::size_t>(k)] = sum / (kfact * four_k) * exp(-x0);
    }
    return out;
  }
  // J^{(k)}(z)/k! = I_k(x) / (2^k x^k k!)
  const std::vector<Real> ik = scaled_bessel_i_table<Real>(x0, order);
  Real denom = 1;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) denom *= 2 * x0 * k;
    out[static_cast<std::size_t>(k)] = ik[static_cast<std::size_t>(k)] / denom;
  }
  return out;
}

template <class Real>
Real proper_density(int n, double gbar_d, double tau_d, Real& condition) {
  using std::abs;
  const int ng = n - 1;
  const int nt = 1;
  const Real gbar = gbar_d;
  const Real w0 = Real(1) / Real(tau_d);
  const Real y0 = (gbar - 1) * (gbar + 1);
  const Real z0 = y0 * w0 * w0;
  const Real a = sqrt(y0);

  PowerSeries2<Real> y(ng, nt, y0);
  if (ng >= 1) y(1, 0) = 2 * gbar;
  if (ng >= 2) y(2, 0) = 1;
  PowerSeries2<Real> w(ng, nt, w0);
  w(0, 1) = -w0 * w0;
  const PowerSeries2<Real> z = y * w * w;
  const PowerSeries2<Real> bessel = z.compose(scaled_j_taylor<Real>(z0, z.nilpotency()));

  PowerSeries2<Real> g(ng, nt, gbar);
  if (ng >= 1) g(1, 0) = 1;
  PowerSeries2<Real> expo = g * w * Real(-1);
  expo(0, 0) = 0;  // e^{-gbar w0} goes into the overall scale
  const PowerSeries2<Real> b = bessel * expo.exp();

  Real sum = 0, mag = 0;
  Real sign = 1;
  for (int k = 0; k < n; ++k) {
    Real f = 0, df_dw = 0;
    for (const PolyTerm& t : proper_f_polynomial(k)) {
      const Real coef = Real(t.num) / Real(t.den);
      const Real gp = pow(gbar, t.g_power);
      f += coef * gp * pow(w0, t.w_power);
      if (t.w_power > 0) df_dw += coef * gp * t.w_power * pow(w0, t.w_power - 1);
    }
    const Real df_dtau = -w0 * w0 * df_dw;
    const Real bk = sign * b(k, 0);
    const Real dbk = sign * b(k, 1);
    const Real t1 = f * dbk;
    const Real t2 = bk * df_dtau;
    sum += t1 - t2;
    mag += abs(t1) + abs(t2);
    sign = -sign;
  }
  condition = sum == 0 ? Real(std::numeric_limits<double>::infinity()) : mag / abs(sum);
  // overall factor e^{x0 - gbar w0} = e^{-w0/(gbar + a)}
  return sum * w0 / n * exp(-w0 / (gbar + a));
}

}  // namespace

double pdf_proper_unitary_exact(int n, double gbar, double tau) {
  if (n < 1 || n > 5) throw DomainError("pdf_proper_unitary_exact: N must lie in [1, 5]");
  if (!(gbar >= 1.0 && gbar <= 100.0)) throw DomainError("pdf_proper_unitary_exact: gbar must lie in [1, 100]");
  if (!(tau > 0.0)) throw DomainError("pdf_proper_unitary_exact: tau must be positive");
  Quad cond;
  const Quad p = proper_density<Quad>(n, gbar, tau, cond);
  // 113-bit significand: keep at least 14 digits after cancellation
  if (!(cond < Quad(1e20)))
    throw PrecisionLoss("pdf_proper_unitary_exact: alternating sum lost " +
                        std::to_string(static_cast<double>(log10(cond))) + " digits at tau=" + std::to_string(tau) +
                        "; a wider floating type is needed");
  return static_cast<double>(p);
}

}  // namespace tdelay
