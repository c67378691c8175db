#include "tdelay/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "tdelay/errors.hpp"
#include "tdelay/rng.hpp"

namespace tdelay {

void MomentAccumulator::add(double x) {
  ++count;
  const double d = x - mean;
  mean += d / static_cast<double>(count);
  m2 += d * (x - mean);
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
  const double n = na + nb;
  const double d = o.mean - mean;
  mean += d * nb / n;
  m2 += o.m2 + d * d * na * nb / n;
  count += o.count;
}

double MomentAccumulator::se_mean() const {
  return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

namespace {

constexpr std::uint64_t kBootstrapStream = 0x5eed;

double pairwise_sum(std::span<const double> xs) {
  // pairwise summation keeps roundoff small for 10^7 heavy-tailed values
  if (xs.size() <= 64) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t h = xs.size() / 2;
  return pairwise_sum(xs.subspan(0, h)) + pairwise_sum(xs.subspan(h));
}

double sum_sq_dev(std::span<const double> xs, double m) {
  if (xs.size() <= 64) {
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s;
  }
  const std::size_t h = xs.size() / 2;
  return sum_sq_dev(xs.subspan(0, h), m) + sum_sq_dev(xs.subspan(h), m);
}

}  // namespace

Summary summarize(std::span<const double> xs, std::uint64_t seed, int resamples) {
  if (xs.size() < 100) throw InsufficientData("summary needs at least 100 values");
  Summary s;
  const double n = static_cast<double>(xs.size());
  s.count = xs.size();
  s.mean = pairwise_sum(xs) / n;
  s.variance = sum_sq_dev(xs, s.mean) / (n - 1.0);
  s.se_mean = std::sqrt(s.variance / n);

  std::vector<double> vars(static_cast<std::size_t>(resamples));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < resamples; ++r) {
    RngStream rng(seed, kBootstrapStream + static_cast<std::uint64_t>(r));
    double sum = 0.0, sum2 = 0.0;
    const double shift = s.mean;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double v = xs[rng.next_u64() % xs.size()] - shift;
      sum += v;
      sum2 += v * v;
    }
    vars[static_cast<std::size_t>(r)] = (sum2 - sum * sum / n) / (n - 1.0);
  }
  MomentAccumulator acc;
  for (double v : vars) acc.add(v);
  s.se_variance = std::sqrt(acc.variance());
  return s;
}

CovarianceEstimate covariance(std::span<const double> a, std::span<const double> b, std::uint64_t seed,
                              int resamples) {
  if (a.size() != b.size()) throw DomainError("covariance: paired samples differ in length");
  if (a.size() < 100) throw InsufficientData("covariance needs at least 100 pairs");
  const std::size_t m = a.size();
  const double n = static_cast<double>(m);
  const double ma = pairwise_sum(a) / n, mb = pairwise_sum(b) / n;
  auto cov_of = [&](auto index) {
    double sa = 0.0, sb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = index(i);
      const double x = a[j] - ma, y = b[j] - mb;
      sa += x;
      sb += y;
      sab += x * y;
    }
    return (sab - sa * sb / n) / (n - 1.0);
  };
  CovarianceEstimate out;
  out.value = cov_of([](std::size_t i) { return i; });
  std::vector<double> reps(static_cast<std::size_t>(resamples));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < resamples; ++r) {
    RngStream rng(seed, kBootstrapStream + static_cast<std::uint64_t>(r));
    reps[static_cast<std::size_t>(r)] = cov_of([&](std::size_t) { return rng.next_u64() % m; });
  }
  MomentAccumulator acc;
  for (double v : reps) acc.add(v);
  out.se = std::sqrt(acc.variance());
  return out;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw InsufficientData("ks_statistic: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

KsTwoSample ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InsufficientData("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

LinearFit least_squares(const std::vector<std::vector<double>>& columns, const std::vector<double>& y) {
  const Eigen::Index m = static_cast<Eigen::Index>(y.size());
  const Eigen::Index p = static_cast<Eigen::Index>(columns.size());
  if (m <= p) throw InsufficientData("least_squares: more parameters than points");
  Eigen::MatrixXd x(m, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (static_cast<Eigen::Index>(columns[static_cast<std::size_t>(j)].size()) != m)
      throw DomainError("least_squares: column length mismatch");
    for (Eigen::Index i = 0; i < m; ++i) x(i, j) = columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  const Eigen::Map<const Eigen::VectorXd> yy(y.data(), m);
  const Eigen::VectorXd c = x.colPivHouseholderQr().solve(yy);
  const Eigen::VectorXd r = yy - x * c;
  const double s2 = r.squaredNorm() / static_cast<double>(m - p);
  const Eigen::MatrixXd cov = (x.transpose() * x).inverse() * s2;
  LinearFit out;
  for (Eigen::Index j = 0; j < p; ++j) {
    out.coef.push_back(c(j));
    out.se.push_back(std::sqrt(std::max(0.0, cov(j, j))));
  }
  out.residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(m));
  return out;
}

}  // namespace tdelay
