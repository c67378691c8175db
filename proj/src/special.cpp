#include "tdelay/special.hpp"

#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "tdelay/errors.hpp"

namespace tdelay {

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: x must be positive");
  return std::lgamma(x);
}

double lower_incomplete_gamma(double a, double z) {
  if (!(a > 0.0) || z < 0.0) throw DomainError("lower_incomplete_gamma: need a > 0, z >= 0");
  return boost::math::tgamma_lower(a, z);
}

double regularized_gamma_p(double a, double z) {
  if (!(a > 0.0) || z < 0.0) throw DomainError("regularized_gamma_p: need a > 0, z >= 0");
  return boost::math::gamma_p(a, z);
}

double regularized_gamma_q(double a, double z) {
  if (!(a > 0.0) || z < 0.0) throw DomainError("regularized_gamma_q: need a > 0, z >= 0");
  return boost::math::gamma_q(a, z);
}

namespace {

constexpr double kEps = 1e-16;

// log K_mu(x) and K_{mu+1}(x)/K_mu(x) for |mu| <= 1/2.
void bessel_k_base(double mu, double x, double& log_k, double& ratio) {
  const double pi = std::numbers::pi;
  if (x <= 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = pi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    // 1/Gamma(1 +- mu) and the antisymmetric combination, free of cancellation
    const double tp = boost::math::tgamma1pm1(mu);
    const double tm = boost::math::tgamma1pm1(-mu);
    const double gp = 1.0 / (1.0 + tp);
    const double gm = 1.0 / (1.0 + tm);
    const double gam1 = mu == 0.0 ? -std::numbers::egamma : (tp - tm) * gp * gm / (2.0 * mu);
    const double gam2 = 0.5 * (gm + gp);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gp;
    double q = 0.5 / (e * gm);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i < 10000; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu * mu);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = c * ff;
      sum += del;
      const double del1 = c * (p - i * ff);
      sum1 += del1;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    log_k = std::log(sum);
    ratio = sum1 * (2.0 / x) / sum;
    return;
  }
  const double a1 = 0.25 - mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h = a1 * h;
  log_k = 0.5 * std::log(pi / (2.0 * x)) - x - std::log(s);
  ratio = (mu + x + 0.5 - h) / x;
}

}  // namespace

std::vector<double> log_bessel_k_sequence(double nu0, int count, double x) {
  if (!(x > 0.0)) throw DomainError("bessel K: x must be positive");
  if (count < 1) return {};
  const double nu = std::abs(nu0);
  if (nu0 < 0.0 && count > 1) throw DomainError("bessel K sequence: start order must be non-negative");
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  double log_k, ratio;
  bessel_k_base(mu, x, log_k, ratio);
  // climb from mu to nu; r_k = K_{mu+k+1}/K_{mu+k}
  for (int k = 0; k < nl; ++k) {
    log_k += std::log(ratio);
    ratio = 1.0 / ratio + 2.0 * (mu + k + 1) / x;
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  out[0] = log_k;
  for (int k = 1; k < count; ++k) {
    log_k += std::log(ratio);
    ratio = 1.0 / ratio + 2.0 * (nu + k) / x;
    out[static_cast<std::size_t>(k)] = log_k;
  }
  return out;
}

double log_bessel_k(double nu, double x) { return log_bessel_k_sequence(std::abs(nu), 1, x)[0]; }

double bessel_k(double nu, double x) { return std::exp(log_bessel_k(nu, x)); }

double bessel_i0(double x) {
  const double ax = std::abs(x);
  return std::exp(ax) * scaled_bessel_i_table<double>(ax, 0)[0];
}

double log_barnes_g(int n) {
  if (n < 1) throw DomainError("log_barnes_g: n must be >= 1");
  // G(n) = prod_{k=1}^{n-2} k!
  double out = 0.0;
  for (int k = 1; k <= n - 2; ++k) out += std::lgamma(k + 1.0);
  return out;
}

double kummer_u_half(double c, double z) {
  if (!(z > 0.0)) throw DomainError("kummer_u_half: z must be positive");
  const double ex = c - 1.5;
  auto f = [&](double w) {
    const double w2 = w * w;
    return std::pow(z + w2, ex) * std::exp(-w2);
  };
  double err = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-14, &err);
  if (!(err <= 1e-10 * std::abs(integral)))
    throw ConvergenceError("kummer_u_half: quadrature error " + std::to_string(err));
  return 2.0 / std::sqrt(std::numbers::pi) * std::pow(z, 1.0 - c) * integral;
}

}  // namespace tdelay
