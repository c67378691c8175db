#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdelay/coupling.hpp"
#include "tdelay/histogram.hpp"
#include "tdelay/observables.hpp"

namespace tdelay {

// partial: factorised cheap sampler. partial_matrix: diagonal of Q_s in the
// eigenbasis of S, from full matrix draws.
enum class Observable { wigner, proper, partial, partial_matrix, heuristic };

std::string to_string(Observable o);
Observable observable_from_string(const std::string& name);
DelayKind delay_kind(Observable o);
// Values produced per draw: N for proper and partial_matrix, else 1.
int values_per_draw(Observable o, int n);

struct SampleRequest {
  Observable observable = Observable::wigner;
  int beta = 2;
  int channels = 1;
  CouplingSpec coupling = CouplingSpec::from_g(1.0);
  // Wigner only: draw at the caller's g instead of the canonical g <= 1.
  bool use_input_g = false;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t batch_size = 4096;
  std::string bins = "log:1e-6:1e6:240";
  // Histogram entries are value * histogram_scale; stored values are not scaled.
  double histogram_scale = 1.0;
  bool keep_values = true;
};

struct SampleResult {
  TimeDelayBatch batch;  // values in draw order, values_per_draw per draw
  EmpiricalDistribution histogram;
  std::uint64_t draws = 0;
  std::uint64_t batches = 0;
};

// Batch b uses RngStream(seed, b). Both drivers merge in batch order and
// give identical results.
SampleResult run_serial(const SampleRequest& req);
SampleResult run_parallel(const SampleRequest& req, int workers = 0);

}  // namespace tdelay
