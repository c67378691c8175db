#include "tdelay/oracles.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "tdelay/charfunc.hpp"
#include "tdelay/errors.hpp"
#include "tdelay/histogram.hpp"
#include "tdelay/series.hpp"
#include "tdelay/special.hpp"

namespace tdelay {

namespace {

constexpr double kPi = std::numbers::pi;

int checked_beta(int beta) {
  if (beta != 1 && beta != 2 && beta != 4) throw DomainError("beta must be 1, 2 or 4");
  return beta;
}

void require_convergent(int beta, int n) {
  checked_beta(beta);
  if (n < 1) throw DomainError("N must be positive");
  if (beta * n <= 2)
    throw DivergentMoment("second moments diverge for beta N <= 2 (beta=" + std::to_string(beta) +
                          ", N=" + std::to_string(n) + ")");
}

void require_unitary_moment(int n, double t) {
  if (n < 2) throw DomainError("unitary moment formulas need N >= 2");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("transmission must lie in (0, 1]");
}

double log_partial_perfect(int beta, int n, double tau) {
  const double k = 0.5 * beta * n;
  const double half = 0.5 * beta;
  return (1.0 + k) * std::log(half) - std::lgamma(1.0 + k) - half / tau - (2.0 + k) * std::log(tau);
}

// gbar + a cos(theta) written without cancellation near theta = pi
struct PhaseFactor {
  double low, a;  // low = gbar - a
  PhaseFactor(double gbar) : a(std::sqrt((gbar - 1.0) * (gbar + 1.0))) { low = 1.0 / (gbar + a); }
  double operator()(double theta) const {
    const double c = std::cos(0.5 * theta);
    return low + 2.0 * a * c * c;
  }
};

template <class F>
double integrate_phase(F f, const char* what) {
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, 15, 1e-13, &err);
  if (!(err <= 1e-9 * std::abs(v) + 1e-300))
    throw ConvergenceError(std::string(what) + ": quadrature error estimate " + std::to_string(err) +
                           " for value " + std::to_string(v));
  return v / kPi;
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) { return parse_bin_spec(spec); }

double var_wigner_perfect(int beta, int n) {
  require_convergent(beta, n);
  const double b = beta, N = n;
  return 4.0 / (N * N * (N + 1.0) * (b * N - 2.0));
}

double var_partial_perfect(int beta, int n) {
  require_convergent(beta, n);
  const double b = beta, N = n;
  return 2.0 / (N * N * (b * N - 2.0));
}

double cov_partial_perfect(int beta, int n) { return var_partial_perfect(beta, n) / (n + 1.0); }

double var_proper_perfect(int beta, int n) {
  require_convergent(beta, n);
  const double b = beta, N = n;
  return (N * (b * (N - 1.0) + 2.0) + 2.0) / (N * N * (N + 1.0) * (b * N - 2.0));
}

double cov_proper_perfect(int beta, int n) {
  require_convergent(beta, n);
  const double N = n;
  return -1.0 / (N * N * (N + 1.0));
}

double var_wigner_unitary(int n, double t) {
  require_unitary_moment(n, t);
  const double N = n;
  return 2.0 * (1.0 - std::pow(1.0 - t, N + 1.0)) / (t * t * N * N * (N * N - 1.0));
}

double var_partial_unitary(int n, double t) {
  require_unitary_moment(n, t);
  const double N = n;
  return (2.0 * N * (1.0 / t - 1.0) + 1.0) / (N * N * (N - 1.0));
}

double cov_partial_unitary(int n, double t) {
  require_unitary_moment(n, t);
  const double N = n;
  const double bracket =
      2.0 * (1.0 - std::pow(1.0 - t, N + 1.0)) / (N + 1.0) - 2.0 * t * (1.0 - t) - t * t / N;
  return bracket / (t * t * N * (N - 1.0) * (N - 1.0));
}

double resonance_width_pdf(int beta, int n, double y) {
  checked_beta(beta);
  if (!(y > 0.0)) throw DomainError("resonance_width_pdf: y must be positive");
  const double h = 0.5 * beta * n;
  return std::exp(h * std::log(h) - std::lgamma(h) + (h - 1.0) * std::log(y) - h * y);
}

double pdf_partial_perfect(int beta, int n, double tau) {
  checked_beta(beta);
  if (!(tau > 0.0)) throw DomainError("pdf_partial_perfect: tau must be positive");
  return std::exp(log_partial_perfect(beta, n, tau));
}

double pdf_partial(int beta, int n, double gbar, double tau) {
  checked_beta(beta);
  if (!(gbar >= 1.0)) throw DomainError("pdf_partial: gbar must be >= 1");
  if (!(tau > 0.0)) throw DomainError("pdf_partial: tau must be positive");
  if (gbar == 1.0) return pdf_partial_perfect(beta, n, tau);
  const PhaseFactor phi(gbar);
  return integrate_phase(
      [&](double th) {
        const double f = phi(th);
        return f * std::exp(log_partial_perfect(beta, n, tau * f));
      },
      "pdf_partial");
}

double cdf_partial(int beta, int n, double gbar, double tau) {
  checked_beta(beta);
  if (!(gbar >= 1.0)) throw DomainError("cdf_partial: gbar must be >= 1");
  if (!(tau > 0.0)) return 0.0;
  const double shape = 1.0 + 0.5 * beta * n;
  const double half = 0.5 * beta;
  if (gbar == 1.0) return boost::math::gamma_q(shape, half / tau);
  const PhaseFactor phi(gbar);
  return integrate_phase([&](double th) { return boost::math::gamma_q(shape, half / (tau * phi(th))); },
                         "cdf_partial");
}

GridFunction pdf_partial_grid(int beta, int n, double gbar, const std::vector<double>& tau) {
  GridFunction out{"pdf-partial", beta, n, gbar, tau, std::vector<double>(tau.size())};
  for (std::size_t i = 0; i < tau.size(); ++i) out.value[i] = pdf_partial(beta, n, gbar, tau[i]);
  return out;
}

double pdf_partial_weak(int beta, int n, double t) {
  checked_beta(beta);
  if (!(t > 0.0)) throw DomainError("pdf_partial_weak: t must be positive");
  const double bn = static_cast<double>(beta) * n;
  const double u = kummer_u_half(0.5 * (bn + 3.0), 1.0 / t);
  return std::exp(-1.0 / t - (2.0 + 0.5 * bn) * std::log(t) - 0.5 * std::log(kPi) - std::lgamma(1.0 + 0.5 * bn)) *
         u;
}

double pdf_partial_weak_sum(int n, double t) {
  if (n < 1) throw DomainError("pdf_partial_weak_sum: N must be positive");
  if (!(t > 0.0)) throw DomainError("pdf_partial_weak_sum: t must be positive");
  double sum = 0.0;
  double dfact = 1.0;  // (2k-1)!!
  for (int k = 0; k <= n; ++k) {
    if (k > 0) dfact *= (2.0 * k - 1.0);
    sum += dfact / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0) * std::ldexp(1.0, k)) * std::pow(t, k - n);
  }
  return std::exp(-1.0 / t) / (std::sqrt(kPi) * std::pow(t, 1.5)) * sum;
}

double pdf_partial_unitary_exact(int n, double gbar, double tau) {
  if (n < 1 || n > 16) throw DomainError("pdf_partial_unitary_exact: N must lie in [1, 16]");
  if (!(gbar >= 1.0)) throw DomainError("pdf_partial_unitary_exact: gbar must be >= 1");
  if (!(tau > 0.0)) throw DomainError("pdf_partial_unitary_exact: tau must be positive");
  const Quad gb = gbar;
  const Quad a = sqrt((gb - 1) * (gb + 1));
  const Quad gamma0 = Quad(1) / Quad(tau);
  const Quad x0 = a * gamma0;

  // I_0(a (gamma0 + h)) e^{-x0} and e^{-gbar h} as series in h
  const std::vector<Quad> i0 = scaled_i0_taylor<Quad>(x0, n);
  PowerSeries<Quad> bessel(n);
  Quad ak = 1;
  for (int k = 0; k <= n; ++k) {
    bessel[k] = i0[static_cast<std::size_t>(k)] * ak;
    ak *= a;
  }
  PowerSeries<Quad> decay(n);
  decay[1] = -gb;
  decay = decay.exp();

  // coefficient n of the product, with its condition estimate
  Quad sum = 0, mag = 0;
  for (int k = 0; k <= n; ++k) {
    const Quad term = bessel[k] * decay[n - k];
    sum += term;
    mag += abs(term);
  }
  if (sum == 0 || mag / abs(sum) > Quad(1e20))
    throw PrecisionLoss("pdf_partial_unitary_exact: alternating sum lost too many digits at tau=" +
                        std::to_string(tau));
  Quad value = (n % 2 ? -sum : sum) * pow(gamma0, n + 2) * exp(-gamma0 / (gb + a));
  return static_cast<double>(value);
}

std::vector<PolyTerm> proper_f_polynomial(int n) {
  if (n < 0 || n > 12) throw DomainError("proper_f_polynomial: n must lie in [0, 12]");
  using boost::multiprecision::cpp_rational;
  using Poly = std::map<std::pair<int, int>, cpp_rational>;
  Poly current{{{n, 0}, cpp_rational(1)}};
  Poly total = current;
  cpp_rational fact = 1;  // (2m+1)!
  for (int m = 1; !current.empty(); ++m) {
    Poly next;
    for (const auto& [pw, c] : current) {
      const auto [i, j] = pw;
      if (i >= 2) next[{i - 2, j}] += c * i * (i - 1);
      if (i >= 1) next[{i - 1, j + 1}] += c * (-2) * i;
    }
    for (auto it = next.begin(); it != next.end();) it = it->second == 0 ? next.erase(it) : std::next(it);
    current = std::move(next);
    fact *= (2 * m) * (2 * m + 1);
    for (const auto& [pw, c] : current) total[pw] += c / fact;
  }
  std::vector<PolyTerm> out;
  for (const auto& [pw, c] : total) {
    if (c == 0) continue;
    out.push_back({pw.first, pw.second, static_cast<long long>(numerator(c)), static_cast<long long>(denominator(c))});
  }
  return out;
}

double eval_poly(const std::vector<PolyTerm>& p, double g, double w) {
  double s = 0.0;
  for (const auto& t : p)
    s += static_cast<double>(t.num) / static_cast<double>(t.den) * std::pow(g, t.g_power) * std::pow(w, t.w_power);
  return s;
}

TailCoefficients tail_coefficients(int beta, int n) {
  checked_beta(beta);
  if (n < 1) throw DomainError("tail_coefficients: N must be positive");
  const double h = 0.5 * beta * n;
  TailCoefficients out{};
  out.b = std::exp(std::lgamma(0.5 + h) - std::lgamma(1.0 + h)) / kPi;
  out.a = std::exp((1.0 + beta * n) * std::log(2.0) + std::lgamma(0.5 + h) - 0.5 * std::log(kPi) -
                   2.0 * std::lgamma(1.0 + h));
  out.c_tilde = std::exp(-0.5 * std::log(kPi) - std::lgamma(1.0 + h));
  if (beta == 2)
    out.c = std::exp(2.0 * (n - 1) * std::log(2.0) - 0.5 * std::log(kPi) - std::log(static_cast<double>(n)) -
                     std::lgamma(2.0 * n));
  return out;
}

Cutoffs cutoffs(int beta, int n, double gbar) {
  checked_beta(beta);
  if (n < 1) throw DomainError("cutoffs: N must be positive");
  if (!(gbar >= 1.0)) throw DomainError("cutoffs: gbar must be >= 1");
  return {1.0 / (2.0 * n * gbar), 1.0 / (n * gbar), 4.0 * std::numbers::e * gbar / n};
}

double wigner_crossover(int n, double g) {
  if (n < 1 || !(g > 0.0)) throw DomainError("wigner_crossover: need N >= 1, g > 0");
  return 1.0 / (g * n * n);
}

LeftTailPrefactor left_tail_prefactor_unitary(int n) {
  if (n < 1 || n > 10) throw DomainError("left_tail_prefactor_unitary: N must lie in [1, 10]");
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  auto factorial = [](int k) {
    cpp_int f = 1;
    for (int j = 2; j <= k; ++j) f *= j;
    return f;
  };
  // Gamma(k + 1/2) / sqrt(pi) = (2k)! / (4^k k!)
  auto half_gamma = [&](int k) { return cpp_rational(factorial(2 * k), cpp_int(factorial(k)) << (2 * k)); };
  // Gamma(x) for x = i/2 + j - 1 with the sqrt(pi) of half-integers removed
  auto gamma_half_grid = [&](int twice_x) -> cpp_rational {
    if (twice_x % 2 == 0) return cpp_rational(factorial(twice_x / 2 - 1));
    return half_gamma((twice_x - 1) / 2);
  };
  auto det = [](std::vector<std::vector<cpp_rational>> m) {
    const std::size_t sz = m.size();
    cpp_rational d = 1;
    for (std::size_t c = 0; c < sz; ++c) {
      std::size_t piv = c;
      while (piv < sz && m[piv][c] == 0) ++piv;
      if (piv == sz) return cpp_rational(0);
      if (piv != c) {
        std::swap(m[piv], m[c]);
        d = -d;
      }
      d *= m[c][c];
      for (std::size_t r = c + 1; r < sz; ++r) {
        const cpp_rational f = m[r][c] / m[c][c];
        for (std::size_t k = c; k < sz; ++k) m[r][k] -= f * m[c][k];
      }
    }
    return d;
  };
  const std::size_t sz = static_cast<std::size_t>(n);
  std::vector<std::vector<cpp_rational>> half(sz, std::vector<cpp_rational>(sz)), full = half;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      half[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = gamma_half_grid(i + 2 * j - 2);
      full[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = cpp_rational(factorial(i + j - 2));
    }
  // sqrt(pi) factors of odd rows cancel against those of Gamma(n/2), n odd
  cpp_rational b = det(half) / det(full);
  for (int k = 1; k <= n; ++k) b *= cpp_rational(factorial(k - 1)) / gamma_half_grid(k);

  cpp_int barnes = 1;  // G(N+2) = prod_{k=1}^{N} k!
  for (int k = 1; k <= n; ++k) barnes *= factorial(k);
  cpp_int z0_int = factorial(n);  // Z(0) / (pi^N 2^{-N^2})
  for (int k = 1; k <= n; ++k) z0_int *= factorial(n + k - 1);

  LeftTailPrefactor out{};
  out.b_n = static_cast<double>(b);
  const double log_a = -0.5 * n * (n + 1) * std::log(2.0) + n * std::log(kPi) +
                       std::log(static_cast<double>(cpp_rational(barnes) * b));
  out.a_n = std::exp(log_a);
  // C_N = sqrt(N/pi) A_N / Z(0); the pi^N factors cancel
  const cpp_rational ratio = cpp_rational(barnes) * b / cpp_rational(z0_int);
  out.c_n = std::sqrt(n / kPi) * std::exp((n * n - 0.5 * n * (n + 1)) * std::log(2.0)) * static_cast<double>(ratio);
  out.power = n * n + 1.5;
  out.rate = n;
  return out;
}

LargeDeviationExponents large_dev_exponents(int beta, int n, double g) {
  checked_beta(beta);
  if (n < 1 || !(g > 0.0)) throw DomainError("large_dev_exponents: need N >= 1, g > 0");
  const double b = beta, N = n;
  LargeDeviationExponents out{};
  out.left_power = b * N * N / 2.0 + 1.5;
  out.left_rate = b * N * g / 2.0;
  out.far_power = 2.0 + b * N / 2.0;
  if (g == 1.0) {
    out.perfect_left_power = 3.0 * b * N * N / 4.0 + N * (1.0 - b / 2.0) / 2.0 + 1.5;
    out.perfect_left_rate = b * N / 2.0;
  }
  return out;
}

double selberg_cauchy_norm(int n, double alpha, double beta) {
  if (n < 1 || !(beta > 0.0)) throw DomainError("selberg_cauchy_norm: need N >= 1, beta > 0");
  const double lam = beta / 2.0;
  const double a = alpha - 1.0 - lam * (n - 1);
  if (!(a > -0.5)) throw DomainError("selberg_cauchy_norm: integral diverges for these parameters");
  double log_m = -n * std::lgamma(1.0 + lam);
  for (int j = 0; j < n; ++j)
    log_m += std::lgamma(lam * j + 2.0 * a + 1.0) + std::lgamma(lam * (j + 1) + 1.0) - 2.0 * std::lgamma(lam * j + a + 1.0);
  const double log2_pref = beta * n * (n - 1) / 2.0 - 2.0 * (alpha - 1.0) * n;
  return std::exp(log2_pref * std::log(2.0) + n * std::log(kPi) + log_m);
}

}  // namespace tdelay
