#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "tdelay/errors.hpp"
#include "tdelay/oracles.hpp"
#include "tdelay/special.hpp"

using namespace tdelay;
using Catch::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

// integral over (0, inf) in u = ln x
template <class F>
double integrate_log(F f, double lo = 1e-6, double hi = 1e8) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double u) {
        const double x = std::exp(u);
        return f(x) * x;
      },
      std::log(lo), std::log(hi), 8, 1e-10);
}

}  // namespace

TEST_CASE("special-function spot values") {
  CHECK(bessel_k(0.5, 1.0) == Approx(0.4610685044478946).epsilon(1e-13));
  CHECK(lower_incomplete_gamma(1.0, 1.0) == Approx(0.6321205588285577).epsilon(1e-13));
}

TEST_CASE("perfect-coupling moments") {
  CHECK(var_wigner_perfect(2, 2) == Approx(1.0 / 6).epsilon(1e-14));
  CHECK(var_wigner_perfect(2, 4) == Approx(1.0 / 120).epsilon(1e-14));
  CHECK(var_wigner_perfect(1, 4) == Approx(1.0 / 40).epsilon(1e-14));
  CHECK(cov_proper_perfect(2, 2) == Approx(-1.0 / 12).epsilon(1e-14));
  for (int n = 2; n <= 6; ++n) {
    CHECK(cov_proper_perfect(2, n) == Approx(-1.0 / (n * n * (n + 1.0))).epsilon(1e-14));
    CHECK(var_partial_perfect(2, n) == Approx(2.0 / (n * n * (2.0 * n - 2))).epsilon(1e-14));
    CHECK(cov_partial_perfect(2, n) == Approx(var_partial_perfect(2, n) / (n + 1)).epsilon(1e-14));
    // pooled sum rule: var(tau_W) = [var(tau_a) + (N-1) cov(tau_a, tau_b)] / N for both decompositions
    for (int beta : {1, 2}) {
      if (beta * n <= 2) continue;
      const double w = var_wigner_perfect(beta, n);
      CHECK((var_proper_perfect(beta, n) + (n - 1) * cov_proper_perfect(beta, n)) / n == Approx(w).epsilon(1e-12));
      CHECK((var_partial_perfect(beta, n) + (n - 1) * cov_partial_perfect(beta, n)) / n == Approx(w).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(var_wigner_perfect(1, 2), DivergentMoment);
  CHECK_THROWS_AS(var_wigner_perfect(2, 1), DivergentMoment);
}

TEST_CASE("arbitrary-coupling moments") {
  CHECK(var_wigner_unitary(2, 0.5) == Approx(7.0 / 12).epsilon(1e-14));
  CHECK(var_wigner_unitary(2, 0.2) == Approx(61.0 / 30).epsilon(1e-14));
  CHECK(var_partial_unitary(2, 0.5) == Approx(1.25).epsilon(1e-14));
  CHECK(cov_partial_unitary(2, 1.0) == Approx(1.0 / 12).epsilon(1e-14));
  for (int n = 2; n <= 8; ++n) {
    CHECK(std::abs(var_wigner_unitary(n, 1.0) - var_wigner_perfect(2, n)) < 1e-12);
    CHECK(std::abs(cov_partial_unitary(n, 1.0) - cov_partial_perfect(2, n)) < 1e-12);
    CHECK(std::abs(var_partial_unitary(n, 1.0) - var_partial_perfect(2, n)) < 1e-12);
  }
  CHECK_THROWS_AS(var_wigner_unitary(1, 0.5), DomainError);
}

TEST_CASE("resonance width density") {
  CHECK(resonance_width_pdf(2, 1, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-14));
  // Porter-Thomas: y^{-1/2} e^{-y/2} / sqrt(2 pi)
  CHECK(resonance_width_pdf(1, 1, 0.7) == Approx(std::exp(-0.35) / std::sqrt(2 * kPi * 0.7)).epsilon(1e-13));
  for (int beta : {1, 2, 4}) {
    CHECK(integrate_log([&](double y) { return resonance_width_pdf(beta, 3, y); }, 1e-12, 1e3) ==
          Approx(1.0).epsilon(1e-8));
    CHECK(integrate_log([&](double y) { return y * resonance_width_pdf(beta, 3, y); }, 1e-12, 1e3) ==
          Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("partial-time density at perfect coupling") {
  CHECK(pdf_partial_perfect(2, 1, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-14));
  // mode at beta / (2 (2 + beta N / 2)) = 1/3 for beta = 2, N = 1
  const double h = 1e-5;
  CHECK(pdf_partial_perfect(2, 1, 1.0 / 3 - h) < pdf_partial_perfect(2, 1, 1.0 / 3));
  CHECK(pdf_partial_perfect(2, 1, 1.0 / 3 + h) < pdf_partial_perfect(2, 1, 1.0 / 3));
  for (int beta : {1, 2, 4})
    for (int n : {1, 3}) {
      CHECK(integrate_log([&](double t) { return pdf_partial_perfect(beta, n, t); }) == Approx(1.0).epsilon(1e-8));
      CHECK(integrate_log([&](double t) { return t * pdf_partial_perfect(beta, n, t); }, 1e-6, 1e12) ==
            Approx(1.0 / n).epsilon(1e-6));
    }
}

TEST_CASE("partial-time density at arbitrary coupling") {
  for (double tau : {0.01, 0.3, 2.0, 50.0}) CHECK(pdf_partial(2, 2, 1.0, tau) == pdf_partial_perfect(2, 2, tau));
  CHECK(integrate_log([](double t) { return pdf_partial(2, 2, 3.0, t); }) == Approx(1.0).epsilon(1e-6));
  const double m1 = integrate_log([](double t) { return t * pdf_partial(2, 2, 3.0, t); }, 1e-6, 1e12);
  const double m2 = integrate_log([](double t) { return t * t * pdf_partial(2, 2, 3.0, t); }, 1e-6, 1e12);
  CHECK(m1 == Approx(0.5).epsilon(1e-6));
  CHECK(m2 - m1 * m1 == Approx(1.25).margin(1e-4));
  // CDF is monotone and differentiates to the pdf
  double prev = 0;
  for (double tau : {0.05, 0.2, 1.0, 5.0, 40.0}) {
    const double c = cdf_partial(1, 2, 4.0, tau);
    CHECK(c > prev);
    prev = c;
    const double h = 1e-4 * tau;
    const double slope = (cdf_partial(1, 2, 4.0, tau + h) - cdf_partial(1, 2, 4.0, tau - h)) / (2 * h);
    CHECK(slope == Approx(pdf_partial(1, 2, 4.0, tau)).epsilon(1e-5));
  }
  CHECK(cdf_partial(1, 2, 4.0, 1e9) == Approx(1.0).margin(1e-9));
}

TEST_CASE("weak-coupling universal density") {
  // beta = 2, N = 1: e^{-1/t} (1/t + 1/2) / (sqrt(pi) t^{3/2})
  for (double t : {0.1, 1.0, 7.0})
    CHECK(pdf_partial_weak(2, 1, t) ==
          Approx(std::exp(-1 / t) * (1 / t + 0.5) / (std::sqrt(kPi) * std::pow(t, 1.5))).epsilon(1e-10));
  for (int n = 1; n <= 6; ++n)
    for (double t : {0.03, 0.4, 1.0, 3.0, 100.0})
      CHECK(pdf_partial_weak(2, n, t) == Approx(pdf_partial_weak_sum(n, t)).epsilon(1e-10));
  // far slope -3/2 with amplitude b_N
  const double s = std::log(pdf_partial_weak(2, 2, 1e6) / pdf_partial_weak(2, 2, 1e3)) / std::log(1e3);
  CHECK(s == Approx(-1.5).margin(1e-3));
  CHECK(pdf_partial_weak(2, 3, 1e8) * std::pow(1e8, 1.5) == Approx(tail_coefficients(2, 3).b).epsilon(1e-3));
  for (int beta : {1, 2, 4})
    CHECK(integrate_log([&](double t) { return pdf_partial_weak(beta, 2, t); }, 1e-4, 1e14) ==
          Approx(1.0).epsilon(1e-6));
}

TEST_CASE("derivative-formula partial density") {
  for (double tau : {0.05, 1.0, 9.0})
    CHECK(pdf_partial_unitary_exact(3, 1.0, tau) == Approx(pdf_partial_perfect(2, 3, tau)).epsilon(1e-12));
  // N = 1: gamma (gbar I_0(a gamma) - a I_1(a gamma)) e^{-gbar gamma} at gamma = 1
  const double gbar = 3.0, a = std::sqrt(8.0);
  const double ref = (gbar * boost::math::cyl_bessel_i(0, a) - a * boost::math::cyl_bessel_i(1, a)) * std::exp(-gbar);
  CHECK(pdf_partial_unitary_exact(1, gbar, 1.0) == Approx(ref).epsilon(1e-12));
  double sup = 0;
  for (int i = 0; i <= 80; ++i) {
    const double tau = 0.01 * std::pow(1e4, i / 80.0);
    sup = std::max(sup, std::abs(pdf_partial(2, 2, 10.0, tau) - pdf_partial_unitary_exact(2, 10.0, tau)));
  }
  CHECK(sup < 1e-6);
  CHECK_THROWS_AS(pdf_partial_unitary_exact(17, 2.0, 1.0), DomainError);
}

TEST_CASE("proper-time F polynomials match the scaled listing") {
  // listing in t = 2 g tau: F_1 = g (1 - 2/(3t)), F_2 = g^2 (1 - 4/(3t) + 4/(15 t^2)) + 1/3,
  // F_3 = g^3 (1 - 2/t + 4/(5 t^2) - 8/(105 t^3)) + g (1 - 2/(5t))
  for (double g : {1.3, 4.0})
    for (double tau : {0.2, 3.0}) {
      const double t = 2 * g * tau, w = 1 / tau;
      CHECK(eval_poly(proper_f_polynomial(0), g, w) == 1.0);
      CHECK(eval_poly(proper_f_polynomial(1), g, w) == Approx(g * (1 - 2 / (3 * t))).epsilon(1e-14));
      CHECK(eval_poly(proper_f_polynomial(2), g, w) ==
            Approx(g * g * (1 - 4 / (3 * t) + 4 / (15 * t * t)) + 1.0 / 3).epsilon(1e-14));
      CHECK(eval_poly(proper_f_polynomial(3), g, w) ==
            Approx(g * g * g * (1 - 2 / t + 4 / (5 * t * t) - 8 / (105 * t * t * t)) + g * (1 - 2 / (5 * t)))
                .epsilon(1e-13));
    }
}

TEST_CASE("proper-time marginal") {
  // all delay times coincide at N = 1
  for (double gbar : {1.0, 3.0, 40.0})
    for (double tau : {0.03, 0.5, 4.0, 200.0})
      CHECK(pdf_proper_unitary_exact(1, gbar, tau) == Approx(pdf_partial_unitary_exact(1, gbar, tau)).epsilon(1e-8));
  for (int n = 2; n <= 4; ++n) {
    const double norm = integrate_log([&](double t) { return pdf_proper_unitary_exact(n, 10.0, t); }, 1e-3, 1e7);
    CHECK(norm == Approx(1.0).epsilon(1e-4));
    const double mean = integrate_log([&](double t) { return t * pdf_proper_unitary_exact(n, 10.0, t); }, 1e-3, 1e6);
    CHECK(mean == Approx(1.0 / n).epsilon(1e-4));
  }
  // The proper and partial densities merge at large tau. Just above 3 t_low_partial
  // the gap is still about 3 % pointwise (confirmed against matrix samples, which
  // follow the proper density), so the pointwise bound starts at 24 t_low_partial.
  const double start = 3 * cutoffs(2, 2, 10.0).t_low_partial;
  double sup_gap = 0, sup_pdf = 0, late = 0;
  for (int i = 0; i <= 40; ++i) {
    const double tau = start * std::pow(1e3, i / 40.0);
    const double p = pdf_partial(2, 2, 10.0, tau);
    const double q = pdf_proper_unitary_exact(2, 10.0, tau);
    sup_gap = std::max(sup_gap, std::abs(q - p));
    sup_pdf = std::max(sup_pdf, p);
    if (tau >= 8 * start) late = std::max(late, std::abs(q - p) / p);
  }
  INFO("normalised sup gap " << sup_gap / sup_pdf << ", late relative gap " << late);
  CHECK(sup_gap / sup_pdf < 0.03);
  CHECK(late < 0.02);
  CHECK_THROWS_AS(pdf_proper_unitary_exact(6, 10.0, 1.0), DomainError);
  CHECK_THROWS_AS(pdf_proper_unitary_exact(2, 200.0, 1.0), DomainError);
}

TEST_CASE("tail coefficients, cutoffs and exponents") {
  const TailCoefficients t1 = tail_coefficients(2, 1);
  CHECK(t1.b == Approx(1 / (2 * std::sqrt(kPi))).epsilon(1e-14));
  CHECK(t1.a == Approx(4.0).epsilon(1e-14));
  REQUIRE(t1.c);
  CHECK(*t1.c == Approx(1 / std::sqrt(kPi)).epsilon(1e-14));
  CHECK_FALSE(tail_coefficients(1, 2).c);
  for (int n = 1; n <= 6; ++n) {
    // (2N-1)!! / (sqrt(pi) N! 2^N) and 2^{1+N} (2N-1)!! / (N!)^2
    double df = 1, fact = 1;
    for (int k = 1; k <= n; ++k) {
      df *= 2 * k - 1;
      fact *= k;
    }
    const TailCoefficients t = tail_coefficients(2, n);
    CHECK(t.b == Approx(df / (std::sqrt(kPi) * fact * std::pow(2.0, n))).epsilon(1e-13));
    CHECK(t.a == Approx(std::pow(2.0, 1 + n) * df / (fact * fact)).epsilon(1e-13));
    CHECK(t.c_tilde > 0);
  }
  const Cutoffs c = cutoffs(2, 2, 10.0);
  CHECK(c.t_up == Approx(20 * std::numbers::e).epsilon(1e-14));
  CHECK(c.t_low == Approx(0.025));
  CHECK(c.t_low_partial == Approx(0.05));
  CHECK(wigner_crossover(2, 0.01) == Approx(25.0));
  const LargeDeviationExponents e = large_dev_exponents(2, 2, 0.01);
  CHECK(e.left_power == 5.5);
  CHECK(e.far_power == 4.0);
  CHECK(large_dev_exponents(1, 2, 0.01).far_power == 3.0);
  CHECK(*large_dev_exponents(2, 2, 1.0).perfect_left_power == 7.5);
  CHECK_FALSE(e.perfect_left_power);
}

TEST_CASE("left-tail prefactor") {
  const LeftTailPrefactor p1 = left_tail_prefactor_unitary(1);
  CHECK(p1.b_n == Approx(1.0).epsilon(1e-15));
  CHECK(p1.a_n == Approx(kPi / 2).epsilon(1e-14));
  CHECK(p1.c_n == Approx(1 / std::sqrt(kPi)).epsilon(1e-14));
  // the weak-coupling N = 1 density behaves as C_1 t^{-5/2} e^{-1/t} (1 + O(t)) as t -> 0
  const double t = 0.01;
  CHECK(pdf_partial_weak(2, 1, t) * std::pow(t, 2.5) * std::exp(1 / t) == Approx(p1.c_n).epsilon(0.006));
  for (int n = 2; n <= 6; ++n) {
    const LeftTailPrefactor p = left_tail_prefactor_unitary(n);
    CHECK(p.c_n > 0);
    CHECK(p.power == n * n + 1.5);
  }
}

TEST_CASE("Cauchy-ensemble normalisation") {
  for (double beta : {1.0, 2.0, 4.0}) CHECK(selberg_cauchy_norm(1, 1.0, beta) == Approx(kPi).epsilon(1e-14));
  // 2-D brute force at N = 2, alpha = 2, beta = 2: int (x-y)^2 / ((1+x^2)(1+y^2))^2
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [](double x) {
    return gauss_kronrod<double, 61>::integrate(
        [&](double v) {
          const double y = std::tan(v);
          const double jac = 1 + y * y;
          return (x - y) * (x - y) / std::pow((1 + x * x) * (1 + y * y), 2) * jac;
        },
        -kPi / 2, kPi / 2, 15, 1e-13);
  };
  const double brute = gauss_kronrod<double, 61>::integrate(
      [&](double u) {
        const double x = std::tan(u);
        return inner(x) * (1 + x * x);
      },
      -kPi / 2, kPi / 2, 15, 1e-12);
  CHECK(selberg_cauchy_norm(2, 2.0, 2.0) == Approx(brute).epsilon(1e-6));
  CHECK_THROWS_AS(selberg_cauchy_norm(3, 1.0, 2.0), DomainError);
}
