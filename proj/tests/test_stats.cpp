#include "catch_amalgamated.hpp"

#include <cmath>

#include "tdelay/errors.hpp"
#include "tdelay/rng.hpp"
#include "tdelay/stats.hpp"

using namespace tdelay;
using Catch::Approx;

TEST_CASE("summary of a standard normal batch") {
  RngStream r(61, 0);
  std::vector<double> xs(1000000);
  for (double& x : xs) x = r.normal();
  const Summary s = summarize(xs, 3);
  CHECK(std::abs(s.mean) < 4 * s.se_mean);
  CHECK(std::abs(s.variance - 1.0) < 4 * s.se_variance);
  CHECK(s.se_mean == Approx(1e-3).epsilon(0.01));
  // var of the sample variance of N(0,1) is 2/n
  CHECK(s.se_variance == Approx(std::sqrt(2e-6)).epsilon(0.15));
  CHECK(summarize(xs, 3).se_variance == s.se_variance);
}

TEST_CASE("summary edge cases") {
  std::vector<double> c(500, 2.5);
  const Summary s = summarize(c);
  CHECK(s.variance == 0.0);
  CHECK(s.mean == 2.5);
  CHECK_THROWS_AS(summarize(std::vector<double>(99, 1.0)), InsufficientData);
}

TEST_CASE("moment accumulator merge equals a single pass") {
  RngStream r(62, 0);
  MomentAccumulator all, a, b;
  for (int i = 0; i < 10000; ++i) {
    const double x = r.gamma(2.0);
    all.add(x);
    (i % 3 ? a : b).add(x);
  }
  a.merge(b);
  CHECK(a.count == all.count);
  CHECK(a.mean == Approx(all.mean).epsilon(1e-13));
  CHECK(a.variance() == Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("covariance of correlated normals") {
  RngStream r(63, 0);
  std::vector<double> a(200000), b(200000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double z = r.normal();
    a[i] = z;
    b[i] = 0.5 * z + r.normal();
  }
  const CovarianceEstimate c = covariance(a, b, 4);
  CHECK(std::abs(c.value - 0.5) < 4 * c.se);
}

TEST_CASE("Kolmogorov-Smirnov") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(1.36) == Approx(0.0494).margin(5e-4));
  RngStream r(64, 0);
  std::vector<double> u(50000), v(50000), w(50000);
  for (auto& x : u) x = r.uniform();
  for (auto& x : v) x = r.uniform();
  for (auto& x : w) x = std::pow(r.uniform(), 1.1);
  CHECK(ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); }) < 1.63 / std::sqrt(50000.0));
  CHECK(ks_two_sample(u, v).p_value > 0.01);
  CHECK(ks_two_sample(u, w).p_value < 1e-6);
}

TEST_CASE("least squares recovers an exact line") {
  std::vector<double> one(20, 1.0), x(20), y(20);
  for (int i = 0; i < 20; ++i) {
    x[static_cast<std::size_t>(i)] = i;
    y[static_cast<std::size_t>(i)] = 3.0 - 0.5 * i;
  }
  const LinearFit f = least_squares({one, x}, y);
  CHECK(f.coef[0] == Approx(3.0).epsilon(1e-12));
  CHECK(f.coef[1] == Approx(-0.5).epsilon(1e-12));
  CHECK(f.residual_rms < 1e-12);
}
