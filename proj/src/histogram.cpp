#include "tdelay/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "tdelay/errors.hpp"

namespace tdelay {

std::vector<double> parse_bin_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4 || (parts[0] != "log" && parts[0] != "lin"))
    throw DomainError("bin spec must look like log:lo:hi:count or lin:lo:hi:count, got '" + spec + "'");
  double lo, hi;
  long count;
  try {
    lo = std::stod(parts[1]);
    hi = std::stod(parts[2]);
    count = std::stol(parts[3]);
  } catch (const std::exception&) {
    throw DomainError("bin spec has a non-numeric field: '" + spec + "'");
  }
  if (!(hi > lo) || count < 1) throw DomainError("bin spec needs lo < hi and count >= 1: '" + spec + "'");
  std::vector<double> edges(static_cast<std::size_t>(count) + 1);
  if (parts[0] == "log") {
    if (!(lo > 0.0)) throw DomainError("log bins need lo > 0: '" + spec + "'");
    const double a = std::log(lo), b = std::log(hi);
    for (long k = 0; k <= count; ++k) edges[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / count);
  } else {
    for (long k = 0; k <= count; ++k) edges[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / count;
  }
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw DomainError("histogram needs at least one bin");
  for (std::size_t k = 1; k < edges_.size(); ++k)
    if (!(edges_[k] > edges_[k - 1])) throw DomainError("histogram edges must be strictly increasing");
  counts_.assign(edges_.size() - 1, 0);
}

void EmpiricalDistribution::add(double x) {
  ++total_;
  if (x < edges_.front()) {
    ++under_;
    return;
  }
  if (x >= edges_.back()) {
    ++over_;
    return;
  }
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  ++counts_[static_cast<std::size_t>(it - edges_.begin()) - 1];
}

void EmpiricalDistribution::accumulate(std::span<const double> xs) {
  for (double x : xs) add(x);
}

void EmpiricalDistribution::merge(const EmpiricalDistribution& other) {
  if (edges_ != other.edges_) throw DomainError("histogram merge: edge lists differ");
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  under_ += other.under_;
  over_ += other.over_;
  total_ += other.total_;
}

EmpiricalDistribution merge(EmpiricalDistribution a, const EmpiricalDistribution& b) {
  a.merge(b);
  return a;
}

double EmpiricalDistribution::ccdf_at_edge(std::size_t k) const {
  if (total_ == 0) return 0.0;
  std::uint64_t above = over_;
  for (std::size_t j = k; j < counts_.size(); ++j) above += counts_[j];
  return static_cast<double>(above) / static_cast<double>(total_);
}

std::vector<HistogramRow> EmpiricalDistribution::table() const {
  std::vector<HistogramRow> rows(counts_.size());
  const double tot = static_cast<double>(total_);
  std::uint64_t below = under_;
  std::uint64_t above = total_ - under_;
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    below += counts_[k];
    above -= counts_[k];
    HistogramRow& r = rows[k];
    r.lo = edges_[k];
    r.hi = edges_[k + 1];
    r.count = counts_[k];
    r.pdf = total_ ? counts_[k] / (tot * (r.hi - r.lo)) : 0.0;
    r.cdf = total_ ? below / tot : 0.0;
    r.ccdf = total_ ? above / tot : 0.0;
  }
  return rows;
}

TailFit fit_tail_exponent(const EmpiricalDistribution& dist, double lo, double hi) {
  const auto& e = dist.edges();
  const auto& c = dist.counts();
  TailFit fit;
  fit.lo = lo;
  fit.hi = hi;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] < lo || e[k] > hi) continue;
    if (k + 1 < e.size() && e[k + 1] <= hi && c[k] > 0) ++fit.occupied_bins;
    const double p = dist.ccdf_at_edge(k);
    if (p <= 0.0) continue;
    xs.push_back(std::log(e[k]));
    ys.push_back(std::log(p));
  }
  if (fit.occupied_bins < 10 || xs.size() < 3)
    throw InsufficientData("tail fit needs at least 10 occupied bins in [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "], found " + std::to_string(fit.occupied_bins));
  const Eigen::Index m = static_cast<Eigen::Index>(xs.size());
  fit.points = xs.size();
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), m), y(ys.data(), m);
  Eigen::MatrixXd d1(m, 2);
  d1.col(0).setOnes();
  d1.col(1) = x;
  const Eigen::VectorXd b1 = d1.colPivHouseholderQr().solve(y);
  fit.intercept = b1(0);
  fit.slope = b1(1);

  // CCDF residuals are strongly correlated, so the standard error and the
  // curvature test come from the binned log-density instead: independent
  // Poisson counts, Var(ln count) ~ 1/count.
  std::vector<double> px, py, pw;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    if (e[k] < lo || e[k + 1] > hi || c[k] == 0) continue;
    px.push_back(0.5 * std::log(e[k] * e[k + 1]));
    py.push_back(std::log(static_cast<double>(c[k]) / (e[k + 1] - e[k])));
    pw.push_back(static_cast<double>(c[k]));
  }
  auto weighted = [&](int cols, Eigen::VectorXd& coef) {
    const Eigen::Index mp = static_cast<Eigen::Index>(px.size());
    Eigen::MatrixXd d(mp, cols);
    Eigen::VectorXd yy(mp);
    for (Eigen::Index i = 0; i < mp; ++i) {
      const double sw = std::sqrt(pw[static_cast<std::size_t>(i)]);
      double xp = 1.0;
      for (int j = 0; j < cols; ++j, xp *= px[static_cast<std::size_t>(i)]) d(i, j) = sw * xp;
      yy(i) = sw * py[static_cast<std::size_t>(i)];
    }
    coef = d.colPivHouseholderQr().solve(yy);
    return Eigen::MatrixXd((d.transpose() * d).inverse());
  };
  Eigen::VectorXd coef;
  const Eigen::MatrixXd cov1 = weighted(2, coef);
  fit.se = std::sqrt(std::max(0.0, cov1(1, 1)));
  fit.curvature_t = 0.0;
  if (px.size() > 3) {
    const Eigen::MatrixXd cov2 = weighted(3, coef);
    const double se2 = std::sqrt(std::max(0.0, cov2(2, 2)));
    if (se2 > 0.0) fit.curvature_t = coef(2) / se2;
  }
  fit.power_law_consistent = std::abs(fit.curvature_t) < 2.0;
  return fit;
}

double power_law_amplitude(const EmpiricalDistribution& dist, double lo, double hi, double exponent) {
  const auto& e = dist.edges();
  const auto& c = dist.counts();
  const double tot = static_cast<double>(dist.total());
  double wsum = 0.0, acc = 0.0;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    if (e[k] < lo || e[k + 1] > hi || c[k] == 0) continue;
    const double width = e[k + 1] - e[k];
    // exact bin average of x^exponent, so bin width does not bias the estimate
    const double xbar = exponent == -1.0 ? std::log(e[k + 1] / e[k]) / width
                                         : (std::pow(e[k + 1], exponent + 1.0) - std::pow(e[k], exponent + 1.0)) /
                                               ((exponent + 1.0) * width);
    const double ratio = (c[k] / (tot * width)) / xbar;
    acc += c[k] * std::log(ratio);
    wsum += c[k];
  }
  if (wsum == 0.0) throw InsufficientData("power_law_amplitude: empty window");
  return std::exp(acc / wsum);
}

}  // namespace tdelay
