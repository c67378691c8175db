#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdelay/observables.hpp"

namespace tdelay {

struct LogDet {
  double log_abs = 0.0;
  int sign = 1;  // 0 for an exactly singular determinant
  double value() const;
};

// Z(0) = pi^N 2^{-N^2} N! prod_{n=1}^N Gamma(N+n)
double log_z0_closed(int n);
double z0_closed(int n);

// log of 2^{-N} prod_{n=1}^N Gamma(N+n), the value of G(k, 0)
double log_g_at_zero(int n);

// G(k, p) = det[(p/xi_j)^{(N+i)/2} K_{N+i}(2 sqrt(p xi_j))] / det[xi_j^{-N-i}],
// xi_j = (1+k_j^2)/(1+g^2 k_j^2), i, j = 1..N. At g = 1 the ratio is the
// confluent (Hankel) limit and does not depend on k. `rcond` receives the
// reciprocal condition estimate of the scaled numerator when non-null.
LogDet detratio_G(std::span<const double> k, double p, double g, double* rcond = nullptr);

// det[p^{(N+i+j-1)/2} K_{N+i+j-1}(2 sqrt p)] divided by its p -> 0 limit.
double z_perfect_hankel(int n, double p);

struct ZEstimate {
  double p = 0.0;
  double z_ratio = 0.0;
  double se = 0.0;
  std::string method;
  std::uint64_t samples = 0;
  std::uint64_t rejected = 0;   // ill-conditioned numerators
  std::uint64_t resampled = 0;  // singular Cayley draws and coincident k
};

// Monte Carlo estimate of Z(p)/Z(0) = E_k[G(k,p)] / G(k,0) with k the
// eigenvalues of the reaction matrix of a CUE draw. Batches of `batch_size`
// use RngStream(seed, batch index) and are merged in batch order.
std::vector<ZEstimate> z_ratio_mc(int n, double g, std::span<const double> p, std::uint64_t samples,
                                  std::uint64_t seed, int workers = 0, std::uint64_t batch_size = 4096);

// Mean of e^{-N p t}, t = 2 tau_W / (beta g), with a batch-means SE (100 groups).
ZEstimate laplace_empirical(const TimeDelayBatch& batch, double p);

struct LeftTailFit {
  double power = 0.0, power_se = 0.0;
  double rate = 0.0, rate_se = 0.0;
  double constant = 0.0;
  std::vector<ZEstimate> points;
};

// Fits ln Z = c + power ln p - rate sqrt(p) to weak-coupling (g = 0) Monte
// Carlo values on the given p grid.
LeftTailFit left_tail_check(int n, std::span<const double> p_grid, std::uint64_t samples, std::uint64_t seed,
                            int workers = 0);

}  // namespace tdelay
