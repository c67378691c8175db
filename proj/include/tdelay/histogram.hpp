#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tdelay {

// Bin edges from a spec string: "log:lo:hi:count" or "lin:lo:hi:count".
std::vector<double> parse_bin_spec(const std::string& spec);

struct HistogramRow {
  double lo, hi;
  std::uint64_t count;
  double pdf, cdf, ccdf;  // cdf and ccdf evaluated at hi
};

class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> edges);
  static EmpiricalDistribution from_spec(const std::string& spec) { return EmpiricalDistribution(parse_bin_spec(spec)); }

  void add(double x);
  void accumulate(std::span<const double> xs);
  // Throws DomainError on differing edges.
  void merge(const EmpiricalDistribution& other);

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t underflow() const { return under_; }
  std::uint64_t overflow() const { return over_; }
  std::uint64_t total() const { return total_; }
  std::size_t bins() const { return counts_.size(); }

  // Fraction of the total strictly above edge k (k = 0..bins).
  double ccdf_at_edge(std::size_t k) const;
  std::vector<HistogramRow> table() const;

  bool operator==(const EmpiricalDistribution& o) const = default;

 private:
  std::vector<double> edges_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t under_ = 0;
  std::uint64_t over_ = 0;
  std::uint64_t total_ = 0;
};

EmpiricalDistribution merge(EmpiricalDistribution a, const EmpiricalDistribution& b);

struct TailFit {
  double lo = 0, hi = 0;
  double slope = 0, se = 0;  // se from the log-density fit
  double intercept = 0;
  std::size_t points = 0;         // edges used in the regression
  std::size_t occupied_bins = 0;  // bins inside the window with counts
  double curvature_t = 0;         // t statistic of a quadratic term in ln pdf
  bool power_law_consistent = false;  // |curvature_t| < 2
};

// OLS of ln CCDF against ln x over the edges inside [lo, hi]. The slope SE and
// the curvature t statistic come from a count-weighted fit of the binned
// log-density on the same window. Throws InsufficientData with fewer than 10
// occupied bins in the window.
TailFit fit_tail_exponent(const EmpiricalDistribution& dist, double lo, double hi);

// Amplitude A of pdf ~ A x^exponent on [lo, hi] with the exponent held fixed:
// geometric mean of pdf / x^exponent over occupied bins, weighted by counts.
double power_law_amplitude(const EmpiricalDistribution& dist, double lo, double hi, double exponent);

}  // namespace tdelay
