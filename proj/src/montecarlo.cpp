#include "tdelay/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "tdelay/errors.hpp"
#include "tdelay/parallel.hpp"

namespace tdelay {

std::string to_string(Observable o) {
  switch (o) {
    case Observable::wigner: return "wigner";
    case Observable::proper: return "proper";
    case Observable::partial: return "partial";
    case Observable::partial_matrix: return "partial-matrix";
    case Observable::heuristic: return "heuristic";
  }
  return "?";
}

Observable observable_from_string(const std::string& name) {
  for (Observable o : {Observable::wigner, Observable::proper, Observable::partial, Observable::partial_matrix,
                       Observable::heuristic})
    if (to_string(o) == name) return o;
  throw DomainError("unknown observable '" + name + "'");
}

DelayKind delay_kind(Observable o) {
  switch (o) {
    case Observable::wigner: return DelayKind::wigner;
    case Observable::proper: return DelayKind::proper;
    case Observable::partial:
    case Observable::partial_matrix: return DelayKind::partial;
    case Observable::heuristic: return DelayKind::heuristic;
  }
  return DelayKind::wigner;
}

int values_per_draw(Observable o, int n) {
  return (o == Observable::proper || o == Observable::partial_matrix) ? n : 1;
}

namespace {

struct BatchOutput {
  std::vector<double> values;
  EmpiricalDistribution hist;
};

void validate(const SampleRequest& req) {
  if (req.channels < 1) throw DomainError("channel count must be positive");
  if (req.samples < 1) throw DomainError("sample count must be at least 1");
  if (req.batch_size < 1) throw DomainError("batch size must be positive");
  if (!(req.histogram_scale > 0.0)) throw DomainError("histogram scale must be positive");
  const bool matrix = req.observable == Observable::wigner || req.observable == Observable::proper ||
                      req.observable == Observable::partial_matrix;
  (void)SymmetryClass(req.beta, matrix ? BetaContext::matrix : BetaContext::formula);
}

BatchOutput run_batch(const SampleRequest& req, std::uint64_t b) {
  BatchOutput out{{}, EmpiricalDistribution::from_spec(req.bins)};
  const SymmetryClass sym(req.beta, BetaContext::formula);
  const int n = req.channels;
  const double g = req.use_input_g && !req.coupling.given_as_transmission() ? req.coupling.input_value()
                                                                            : req.coupling.g();
  const std::uint64_t count = std::min(req.batch_size, req.samples - b * req.batch_size);
  out.values.reserve(count * static_cast<std::uint64_t>(values_per_draw(req.observable, n)));
  RngStream rng(req.seed, b);
  for (std::uint64_t s = 0; s < count; ++s) {
    switch (req.observable) {
      case Observable::wigner:
        out.values.push_back(sample_wigner_time(sym, n, g, rng));
        break;
      case Observable::proper: {
        const CavitySample cs = build_sample(sym, n, req.coupling, rng);
        for (double v : proper_times(cs.Q_s)) out.values.push_back(v);
        break;
      }
      case Observable::partial_matrix: {
        const CavitySample cs = build_sample(sym, n, req.coupling, rng);
        for (double v : partial_times(cs)) out.values.push_back(v);
        break;
      }
      case Observable::partial:
        out.values.push_back(sample_partial_cheap(req.beta, n, req.coupling, rng));
        break;
      case Observable::heuristic:
        out.values.push_back(sample_heuristic(req.beta, n, req.coupling.transmission(), rng));
        break;
    }
  }
  if (req.histogram_scale == 1.0) {
    out.hist.accumulate(out.values);
  } else {
    for (double v : out.values) out.hist.add(v * req.histogram_scale);
  }
  return out;
}

SampleResult empty_result(const SampleRequest& req) {
  SampleResult r{{delay_kind(req.observable), req.beta, req.channels, req.coupling.g(), {}},
                 EmpiricalDistribution::from_spec(req.bins), req.samples, 0};
  if (req.use_input_g && !req.coupling.given_as_transmission()) r.batch.g = req.coupling.input_value();
  if (req.keep_values)
    r.batch.values.reserve(req.samples * static_cast<std::uint64_t>(values_per_draw(req.observable, req.channels)));
  return r;
}

void absorb(const SampleRequest& req, SampleResult& r, BatchOutput& part) {
  r.histogram.merge(part.hist);
  if (req.keep_values) r.batch.values.insert(r.batch.values.end(), part.values.begin(), part.values.end());
  std::vector<double>().swap(part.values);
  ++r.batches;
}

std::uint64_t batch_count(const SampleRequest& req) { return (req.samples + req.batch_size - 1) / req.batch_size; }

// Batches in flight per parallel wave; bounds memory for very long runs.
constexpr std::uint64_t kWave = 1024;

}  // namespace

SampleResult run_serial(const SampleRequest& req) {
  validate(req);
  SampleResult r = empty_result(req);
  const std::uint64_t nb = batch_count(req);
  for (std::uint64_t b = 0; b < nb; ++b) {
    BatchOutput part = run_batch(req, b);
    absorb(req, r, part);
  }
  return r;
}

SampleResult run_parallel(const SampleRequest& req, int workers) {
  validate(req);
  SampleResult r = empty_result(req);
  const std::uint64_t nb = batch_count(req);
  const int threads = resolve_workers(workers);
  for (std::uint64_t first = 0; first < nb; first += kWave) {
    const std::uint64_t count = std::min(kWave, nb - first);
    std::vector<BatchOutput> parts(count, BatchOutput{{}, EmpiricalDistribution::from_spec(req.bins)});
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::uint64_t i = 0; i < count; ++i) {
      try {
        parts[i] = run_batch(req, first + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);
    for (BatchOutput& p : parts) absorb(req, r, p);
  }
  return r;
}

}  // namespace tdelay
