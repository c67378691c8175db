#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "tdelay/charfunc.hpp"
#include "tdelay/errors.hpp"
#include "tdelay/montecarlo.hpp"
#include "tdelay/oracles.hpp"

using namespace tdelay;
using Catch::Approx;
using boost::math::cyl_bessel_k;

namespace {

double xi(double k, double g) { return (1 + k * k) / (1 + g * g * k * k); }

}  // namespace

TEST_CASE("closed-form normalisations") {
  CHECK(z0_closed(1) == Approx(std::numbers::pi / 2).epsilon(1e-14));
  // pi^2 2^-4 2! Gamma(3) Gamma(4)
  CHECK(z0_closed(2) == Approx(std::numbers::pi * std::numbers::pi / 16 * 2 * 2 * 6).epsilon(1e-14));
  CHECK(std::exp(log_g_at_zero(1)) == Approx(0.5).epsilon(1e-14));
  CHECK(std::exp(log_g_at_zero(3)) == Approx(6.0 * 24 * 120 / 8).epsilon(1e-13));
  // Z(0) = G(k, 0) * Cauchy normalisation with exponent N
  for (int n = 1; n <= 4; ++n)
    CHECK(log_z0_closed(n) ==
          Approx(log_g_at_zero(n) + std::log(selberg_cauchy_norm(n, n, 2.0))).epsilon(1e-10));
}

TEST_CASE("single-channel determinant ratio") {
  // G = (p / xi)^{1/2}... with nu = 2: (p/xi) K_2(2 sqrt(p xi)) / xi^{-2}
  for (double g : {0.1, 0.6, 2.0})
    for (double k : {-3.0, 0.2, 1.7})
      for (double p : {0.01, 1.0, 30.0}) {
        const double x = xi(k, g);
        const double ref = (p / x) * cyl_bessel_k(2, 2 * std::sqrt(p * x)) * x * x;
        const double got = detratio_G(std::vector<double>{k}, p, g).value();
        CHECK(got == Approx(ref).epsilon(1e-11));
      }
}

TEST_CASE("two-channel determinant ratio") {
  const double g = 0.3, p = 0.8;
  const std::vector<double> k{-0.4, 1.9};
  double num[2][2], den[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double nu = 3 + i, x = xi(k[j], g);
      num[i][j] = std::pow(p / x, nu / 2) * cyl_bessel_k(nu, 2 * std::sqrt(p * x));
      den[i][j] = std::pow(x, -nu);
    }
  const double ref = (num[0][0] * num[1][1] - num[0][1] * num[1][0]) / (den[0][0] * den[1][1] - den[0][1] * den[1][0]);
  CHECK(detratio_G(k, p, g).value() == Approx(ref).epsilon(1e-10));
}

TEST_CASE("determinant ratio at p = 0 and near g = 1") {
  const std::vector<double> k{-1.2, 0.3, 2.5};
  const LogDet d = detratio_G(k, 0.0, 0.2);
  CHECK(d.sign == 1);
  CHECK(d.log_abs == log_g_at_zero(3));
  CHECK(detratio_G(k, 1e-12, 0.2).value() / std::exp(log_g_at_zero(3)) == Approx(1.0).epsilon(1e-8));
  // continuity into the confluent limit
  const double at_one = detratio_G(k, 0.5, 1.0).value();
  CHECK(detratio_G(k, 0.5, 1.0 - 1e-4).value() == Approx(at_one).epsilon(1e-3));
  CHECK(at_one / std::exp(log_g_at_zero(3)) == Approx(z_perfect_hankel(3, 0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(detratio_G(std::vector<double>{0.5, 0.5}, 1.0, 0.2), SingularMatrix);
}

TEST_CASE("perfect-coupling Hankel ratio") {
  CHECK(z_perfect_hankel(1, 1.0) == Approx(2 * cyl_bessel_k(2, 2.0)).epsilon(1e-13));
  CHECK(z_perfect_hankel(1, 1.0) == Approx(0.50752).margin(5e-5));
  CHECK(z_perfect_hankel(2, 0.0) == 1.0);
  double prev = 1.0;
  for (double p : {0.01, 0.1, 1.0, 10.0}) {
    const double z = z_perfect_hankel(2, p);
    CHECK(z < prev);
    CHECK(z > 0);
    prev = z;
  }
}

TEST_CASE("Monte Carlo characteristic function") {
  const std::vector<double> p{0.0, 0.1, 1.0};
  const auto a = z_ratio_mc(2, 0.1, p, 3000, 7, 1, 512);
  const auto b = z_ratio_mc(2, 0.1, p, 3000, 7, 3, 512);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(a[i].z_ratio == b[i].z_ratio);
    CHECK(a[i].se == b[i].se);
    CHECK(a[i].samples == 3000);
  }
  CHECK(a[0].z_ratio == 1.0);
  CHECK(a[0].se == 0.0);
  CHECK(a[1].z_ratio < 1.0);
  CHECK(a[2].z_ratio < a[1].z_ratio);

  const auto perfect = z_ratio_mc(2, 1.0, std::vector<double>{1.0}, 10, 7);
  CHECK(perfect[0].z_ratio == z_perfect_hankel(2, 1.0));
  CHECK(perfect[0].se == 0.0);
}

TEST_CASE("Laplace transform of sampled Wigner times") {
  SampleRequest req;
  req.channels = 2;
  req.coupling = CouplingSpec::from_g(0.1);
  req.samples = 20000;
  req.seed = 3;
  const SampleResult r = run_serial(req);
  const ZEstimate zero = laplace_empirical(r.batch, 0.0);
  CHECK(zero.z_ratio == 1.0);
  CHECK(zero.se == 0.0);
  const ZEstimate lap = laplace_empirical(r.batch, 0.1);
  const auto mc = z_ratio_mc(2, 0.1, std::vector<double>{0.1}, 20000, 4);
  CHECK(std::abs(lap.z_ratio - mc[0].z_ratio) < 4 * std::hypot(lap.se, mc[0].se));
}
