#include "catch_amalgamated.hpp"

#include <cmath>

#include "tdelay/errors.hpp"
#include "tdelay/histogram.hpp"
#include "tdelay/rng.hpp"

using namespace tdelay;
using Catch::Approx;

TEST_CASE("bin specs") {
  const std::vector<double> e = parse_bin_spec("log:1e-2:1e2:4");
  REQUIRE(e.size() == 5);
  CHECK(e[0] == Approx(0.01));
  CHECK(e[2] == Approx(1.0));
  CHECK(e[4] == Approx(100.0));
  CHECK(parse_bin_spec("lin:0:1:10")[3] == Approx(0.3));
  CHECK_THROWS_AS(parse_bin_spec("log:0:1:10"), DomainError);
  CHECK_THROWS_AS(parse_bin_spec("cubic:1:2:3"), DomainError);
  CHECK_THROWS_AS(parse_bin_spec("lin:2:1:3"), DomainError);
  CHECK_THROWS_AS(parse_bin_spec("lin:1:2:x"), DomainError);
}

TEST_CASE("merge conserves totals and pdf integrates to the in-range fraction") {
  RngStream r(51, 0);
  EmpiricalDistribution a = EmpiricalDistribution::from_spec("log:1e-3:1e1:80");
  EmpiricalDistribution b = EmpiricalDistribution::from_spec("log:1e-3:1e1:80");
  for (int i = 0; i < 50000; ++i) a.add(-std::log(r.uniform()));
  for (int i = 0; i < 30000; ++i) b.add(r.gamma(0.3) * 5);
  const EmpiricalDistribution m = merge(a, b);
  CHECK(m.total() == a.total() + b.total());
  std::uint64_t counted = m.underflow() + m.overflow();
  for (auto c : m.counts()) counted += c;
  CHECK(counted == m.total());
  double integral = 0;
  for (const HistogramRow& row : m.table()) integral += row.pdf * (row.hi - row.lo);
  const double inside = 1.0 - static_cast<double>(m.underflow() + m.overflow()) / m.total();
  CHECK(std::abs(integral - inside) < 1e-12);
  EmpiricalDistribution other = EmpiricalDistribution::from_spec("lin:0:1:80");
  CHECK_THROWS_AS(other.merge(a), DomainError);
  // merge is order independent
  CHECK(merge(a, b) == merge(b, a));
}

TEST_CASE("Pareto tail slope is recovered") {
  RngStream r(52, 0);
  EmpiricalDistribution d = EmpiricalDistribution::from_spec("log:1e-1:1e4:150");
  for (int i = 0; i < 1000000; ++i) d.add(std::pow(r.uniform(), -0.5));  // CCDF x^{-2}, x >= 1
  const TailFit f = fit_tail_exponent(d, 1.0, 100.0);
  CHECK(f.slope == Approx(-2.0).margin(0.05));
  CHECK(f.power_law_consistent);
  // pdf 2 x^{-3}
  CHECK(power_law_amplitude(d, 1.0, 100.0, -3.0) == Approx(2.0).epsilon(0.02));
}

TEST_CASE("an exponential sample is not reported as a power law") {
  RngStream r(53, 0);
  EmpiricalDistribution d = EmpiricalDistribution::from_spec("log:1e-2:1e2:120");
  for (int i = 0; i < 1000000; ++i) d.add(-std::log(r.uniform()));
  const TailFit f = fit_tail_exponent(d, 0.5, 8.0);
  CHECK_FALSE(f.power_law_consistent);
}

TEST_CASE("a flat CCDF segment gives slope zero; empty windows are refused") {
  EmpiricalDistribution d = EmpiricalDistribution::from_spec("log:1e-2:1e4:120");
  for (int i = 0; i < 1000000; ++i) d.add(0.05);
  for (int i = 0; i < 1000000; ++i) d.add(5000.0);
  EmpiricalDistribution empty = d;
  // one entry per bin across [0.1, 100] keeps the CCDF flat to 1e-5
  for (int k = 0; k < 60; ++k) d.add(0.1 * std::pow(10.0, 0.05 * k + 0.025));
  const TailFit f = fit_tail_exponent(d, 0.1, 100.0);
  CHECK(std::abs(f.slope) < 1e-4);
  CHECK(std::abs(f.slope) <= 4 * f.se + 1e-12);
  CHECK_THROWS_AS(fit_tail_exponent(empty, 0.1, 100.0), InsufficientData);
}
