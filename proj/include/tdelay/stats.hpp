#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tdelay {

// Streaming mean / second central moment with Chan's pairwise merge.
struct MomentAccumulator {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const MomentAccumulator& o);
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double se_mean() const;
};

struct Summary {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;  // bootstrap, 200 resamples
};

// Throws InsufficientData below 100 values. The bootstrap draws from
// RngStream(seed, 0x5eed) and is deterministic.
Summary summarize(std::span<const double> xs, std::uint64_t seed = 0, int resamples = 200);

// Sample covariance of paired observations with a bootstrap SE.
struct CovarianceEstimate {
  double value = 0.0;
  double se = 0.0;
};
CovarianceEstimate covariance(std::span<const double> a, std::span<const double> b, std::uint64_t seed = 0,
                              int resamples = 200);

// Asymptotic Kolmogorov survival function Q(lambda).
double kolmogorov_q(double lambda);

// sup |F_n - F| for a sample (sorted internally) against a continuous CDF.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);

struct KsTwoSample {
  double d = 0.0;
  double p_value = 0.0;
};
KsTwoSample ks_two_sample(std::vector<double> a, std::vector<double> b);

// Ordinary least squares y = X c with standard errors from residuals.
struct LinearFit {
  std::vector<double> coef;
  std::vector<double> se;
  double residual_rms = 0.0;
};
LinearFit least_squares(const std::vector<std::vector<double>>& columns, const std::vector<double>& y);

}  // namespace tdelay
