#include "tdelay/charfunc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "tdelay/ensembles.hpp"
#include "tdelay/errors.hpp"
#include "tdelay/parallel.hpp"
#include "tdelay/series.hpp"
#include "tdelay/special.hpp"
#include "tdelay/stats.hpp"

namespace tdelay {

namespace {

// Numerators with a smaller reciprocal condition number are rejected.
constexpr double kRcondFloor = 1e-12;
// |k_i^2 - k_j^2| / ((1+k_i^2)(1+k_j^2)) below this counts as coincident.
constexpr double kCoincidence = 1e-10;

// Running mean and second moment of sign * e^{l}, stored relative to e^{ref}.
struct LogMeanAccumulator {
  std::uint64_t n = 0;
  double ref = -std::numeric_limits<double>::infinity();
  double s1 = 0.0, s2 = 0.0;

  void rebase(double new_ref) {
    if (new_ref <= ref) return;
    if (n > 0) {
      const double f = std::exp(ref - new_ref);
      s1 *= f;
      s2 *= f * f;
    }
    ref = new_ref;
  }
  void add(double log_abs, int sign) {
    rebase(log_abs);
    const double v = sign * std::exp(log_abs - ref);
    s1 += v;
    s2 += v * v;
    ++n;
  }
  void merge(LogMeanAccumulator o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    rebase(o.ref);
    o.rebase(ref);
    s1 += o.s1;
    s2 += o.s2;
    n += o.n;
  }
  double mean() const { return n ? s1 / n * std::exp(ref) : 0.0; }
  double se() const {
    if (n < 2) return 0.0;
    const double m = s1 / n;
    const double var = std::max(0.0, (s2 / n - m * m) * n / (n - 1.0));
    return std::sqrt(var / n) * std::exp(ref);
  }
};

// log|det| and sign of exp(l_ij) via row/column scaling and full-pivot LU.
LogDet log_det_from_logs(const Eigen::MatrixXd& l, double* rcond) {
  const Eigen::Index n = l.rows();
  Eigen::VectorXd row = l.rowwise().maxCoeff();
  Eigen::MatrixXd shifted = l.colwise() - row;
  Eigen::RowVectorXd col = shifted.colwise().maxCoeff();
  shifted.rowwise() -= col;
  const Eigen::MatrixXd m = shifted.array().exp().matrix();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (rcond) *rcond = lu.rcond();
  const double d = lu.determinant();
  LogDet out;
  if (d == 0.0 || !std::isfinite(d)) {
    out.sign = 0;
    out.log_abs = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.sign = d > 0 ? 1 : -1;
  out.log_abs = std::log(std::abs(d)) + row.sum() + col.sum();
  (void)n;
  return out;
}

double log_hankel_ratio(int n, double p) {
  if (p == 0.0) return 0.0;
  const int nu_count = 2 * n - 1;  // orders N+1 .. 3N-1
  const double x = 2.0 * std::sqrt(p);
  const std::vector<double> lk = log_bessel_k_sequence(n + 1.0, nu_count, x);
  const double lp = std::log(p);
  std::vector<std::vector<Quad>> h(static_cast<std::size_t>(n), std::vector<Quad>(static_cast<std::size_t>(n)));
  std::vector<std::vector<Quad>> h0 = h;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      const int nu = n + i + j - 1;
      const auto r = static_cast<std::size_t>(i - 1), c = static_cast<std::size_t>(j - 1);
      // p -> 0 limit of each entry is Gamma(nu)/2
      h[r][c] = exp(Quad(0.5 * nu * lp + lk[static_cast<std::size_t>(nu - n - 1)]));
      h0[r][c] = exp(Quad(std::lgamma(nu) - std::log(2.0)));
    }
  auto det = [](std::vector<std::vector<Quad>> m) {
    const std::size_t sz = m.size();
    Quad d = 1;
    for (std::size_t c = 0; c < sz; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < sz; ++r)
        if (abs(m[r][c]) > abs(m[piv][c])) piv = r;
      if (m[piv][c] == 0) return Quad(0);
      if (piv != c) {
        std::swap(m[piv], m[c]);
        d = -d;
      }
      d *= m[c][c];
      for (std::size_t r = c + 1; r < sz; ++r) {
        const Quad f = m[r][c] / m[c][c];
        for (std::size_t k = c; k < sz; ++k) m[r][k] -= f * m[c][k];
      }
    }
    return d;
  };
  const Quad ratio = det(h) / det(h0);
  if (!(ratio > 0)) throw PrecisionLoss("z_perfect_hankel: determinant ratio lost its sign at p=" + std::to_string(p));
  return static_cast<double>(log(ratio));
}

}  // namespace

double LogDet::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

double log_z0_closed(int n) {
  if (n < 1) throw DomainError("z0_closed: N must be positive");
  double out = n * std::log(std::numbers::pi) - static_cast<double>(n) * n * std::log(2.0) + std::lgamma(n + 1.0);
  for (int k = 1; k <= n; ++k) out += std::lgamma(n + k);
  return out;
}

double z0_closed(int n) { return std::exp(log_z0_closed(n)); }

double log_g_at_zero(int n) {
  if (n < 1) throw DomainError("log_g_at_zero: N must be positive");
  double out = -n * std::log(2.0);
  for (int k = 1; k <= n; ++k) out += std::lgamma(n + k);
  return out;
}

LogDet detratio_G(std::span<const double> k, double p, double g, double* rcond) {
  const int n = static_cast<int>(k.size());
  if (n < 1) throw DomainError("detratio_G: need at least one k");
  if (p < 0.0) throw DomainError("detratio_G: p must be non-negative");
  if (!(g >= 0.0)) throw DomainError("detratio_G: g must be non-negative");
  if (rcond) *rcond = 1.0;
  if (p == 0.0) return {log_g_at_zero(n), 1};
  if (g == 1.0) return {log_g_at_zero(n) + log_hankel_ratio(n, p), 1};

  std::vector<double> log_xi(static_cast<std::size_t>(n)), k2(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double kk = k[static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(j)];
    k2[static_cast<std::size_t>(j)] = kk;
    log_xi[static_cast<std::size_t>(j)] = std::log1p(kk) - std::log1p(g * g * kk);
  }

  // denominator det[x_j^{N+i}], x = 1/xi, as a Vandermonde product
  double log_den = 0.0;
  int sign_den = 1;
  for (int j = 0; j < n; ++j) log_den -= (n + 1) * log_xi[static_cast<std::size_t>(j)];
  const double spread = 1.0 - g * g;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double ki = k2[static_cast<std::size_t>(i)], kj = k2[static_cast<std::size_t>(j)];
      const double rel = (ki - kj) / ((1.0 + ki) * (1.0 + kj));
      if (std::abs(rel) < kCoincidence) throw SingularMatrix("detratio_G: coincident |k| values");
      const double diff = spread * rel;  // x_j - x_i
      log_den += std::log(std::abs(diff));
      if (diff < 0.0) sign_den = -sign_den;
    }

  Eigen::MatrixXd l(n, n);
  const double lp = std::log(p);
  for (int j = 0; j < n; ++j) {
    const double lx = log_xi[static_cast<std::size_t>(j)];
    const double arg = 2.0 * std::sqrt(p) * std::exp(0.5 * lx);
    const std::vector<double> lk = log_bessel_k_sequence(n + 1.0, n, arg);
    for (int i = 1; i <= n; ++i) {
      const int nu = n + i;
      l(i - 1, j) = 0.5 * nu * (lp - lx) + lk[static_cast<std::size_t>(i - 1)];
    }
  }
  LogDet num = log_det_from_logs(l, rcond);
  if (num.sign == 0) return num;
  return {num.log_abs - log_den, num.sign * sign_den};
}

double z_perfect_hankel(int n, double p) {
  if (n < 1) throw DomainError("z_perfect_hankel: N must be positive");
  if (p < 0.0) throw DomainError("z_perfect_hankel: p must be non-negative");
  return std::exp(log_hankel_ratio(n, p));
}

std::vector<ZEstimate> z_ratio_mc(int n, double g, std::span<const double> p, std::uint64_t samples,
                                  std::uint64_t seed, int workers, std::uint64_t batch_size) {
  if (n < 1) throw DomainError("z_ratio_mc: N must be positive");
  if (!(g >= 0.0)) throw DomainError("z_ratio_mc: g must be non-negative");
  if (batch_size == 0) throw DomainError("z_ratio_mc: batch size must be positive");
  for (double pv : p)
    if (pv < 0.0) throw DomainError("z_ratio_mc: p must be non-negative");
  const std::size_t np = p.size();
  std::vector<ZEstimate> out(np);
  for (std::size_t q = 0; q < np; ++q) {
    out[q].p = p[q];
    out[q].samples = samples;
  }

  if (g == 1.0) {
    for (std::size_t q = 0; q < np; ++q) {
      out[q].z_ratio = z_perfect_hankel(n, p[q]);
      out[q].method = "cauchy-mc(confluent)";
    }
    return out;
  }

  const double log_g0 = log_g_at_zero(n);
  const std::uint64_t batches = (samples + batch_size - 1) / batch_size;
  struct BatchResult {
    std::vector<LogMeanAccumulator> acc;
    std::uint64_t rejected = 0, resampled = 0;
  };
  std::vector<BatchResult> results(batches);
  std::vector<std::exception_ptr> errors(batches);

#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(workers))
  for (std::uint64_t b = 0; b < batches; ++b) {
    try {
      BatchResult& r = results[b];
      r.acc.assign(np, LogMeanAccumulator{});
      RngStream rng(seed, b);
      const std::uint64_t count = std::min(batch_size, samples - b * batch_size);
      std::vector<LogDet> vals(np);
      for (std::uint64_t s = 0; s < count;) {
        const UnitaryMatrix u = haar_unitary(n, rng);
        RVector kv;
        try {
          kv = hermitian_eigenvalues(cayley_reaction(u));
        } catch (const SingularMatrix&) {
          ++r.resampled;
          continue;
        }
        bool redraw = false, reject = false;
        for (std::size_t q = 0; q < np && !redraw; ++q) {
          double rc = 1.0;
          try {
            vals[q] = detratio_G(std::span<const double>(kv.data(), static_cast<std::size_t>(kv.size())), p[q], g, &rc);
          } catch (const SingularMatrix&) {
            redraw = true;
          }
          if (rc < kRcondFloor || vals[q].sign == 0) reject = true;
        }
        if (redraw) {
          ++r.resampled;
          continue;
        }
        ++s;
        if (reject) {
          ++r.rejected;
          continue;
        }
        for (std::size_t q = 0; q < np; ++q) r.acc[q].add(vals[q].log_abs - log_g0, vals[q].sign);
      }
    } catch (...) {
      errors[b] = std::current_exception();
    }
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<LogMeanAccumulator> total(np);
  std::uint64_t rejected = 0, resampled = 0;
  for (const BatchResult& r : results) {
    for (std::size_t q = 0; q < np; ++q) total[q].merge(r.acc[q]);
    rejected += r.rejected;
    resampled += r.resampled;
  }
  for (std::size_t q = 0; q < np; ++q) {
    out[q].method = "cauchy-mc";
    out[q].rejected = rejected;
    out[q].resampled = resampled;
    if (p[q] == 0.0) {
      out[q].z_ratio = 1.0;
      out[q].se = 0.0;
    } else {
      out[q].z_ratio = total[q].mean();
      out[q].se = total[q].se();
    }
  }
  return out;
}

ZEstimate laplace_empirical(const TimeDelayBatch& batch, double p) {
  if (batch.kind != DelayKind::wigner) throw DomainError("laplace_empirical: batch must hold Wigner times");
  if (p < 0.0) throw DomainError("laplace_empirical: p must be non-negative");
  ZEstimate out;
  out.p = p;
  out.method = "laplace";
  out.samples = batch.values.size();
  if (batch.values.empty()) throw InsufficientData("laplace_empirical: empty batch");
  if (p == 0.0) {
    out.z_ratio = 1.0;
    return out;
  }
  const double scale = batch.channels * p * 2.0 / (batch.beta * batch.g);
  const std::size_t m = batch.values.size();
  const std::size_t groups = std::min<std::size_t>(100, m);
  MomentAccumulator group_means;
  double total = 0.0;
  for (std::size_t gidx = 0; gidx < groups; ++gidx) {
    const std::size_t lo = m * gidx / groups, hi = m * (gidx + 1) / groups;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::exp(-scale * batch.values[i]);
    total += s;
    group_means.add(s / static_cast<double>(hi - lo));
  }
  out.z_ratio = total / static_cast<double>(m);
  out.se = group_means.count > 1 ? std::sqrt(group_means.variance() / static_cast<double>(groups)) : 0.0;
  return out;
}

LeftTailFit left_tail_check(int n, std::span<const double> p_grid, std::uint64_t samples, std::uint64_t seed,
                            int workers) {
  if (p_grid.size() < 4) throw InsufficientData("left_tail_check: need at least 4 p values");
  LeftTailFit fit;
  fit.points = z_ratio_mc(n, 0.0, p_grid, samples, seed, workers);
  std::vector<double> ones, logp, root, y;
  for (const ZEstimate& z : fit.points) {
    if (!(z.z_ratio > 0.0)) throw InsufficientData("left_tail_check: non-positive Z estimate");
    ones.push_back(1.0);
    logp.push_back(std::log(z.p));
    root.push_back(-std::sqrt(z.p));
    y.push_back(std::log(z.z_ratio));
  }
  const LinearFit lf = least_squares({ones, logp, root}, y);
  fit.constant = lf.coef[0];
  fit.power = lf.coef[1];
  fit.power_se = lf.se[1];
  fit.rate = lf.coef[2];
  fit.rate_se = lf.se[2];
  return fit;
}

}  // namespace tdelay
