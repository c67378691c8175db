// Serial reference vs OpenMP driver on a few representative workloads.
// Usage: tdelay_bench [samples] [workers]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "tdelay/charfunc.hpp"
#include "tdelay/montecarlo.hpp"

using namespace tdelay;

namespace {

template <class F>
double time_it(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t samples = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  const int workers = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();

  struct Case {
    const char* label;
    Observable obs;
    int beta, n;
    double g;
  };
  const std::vector<Case> cases = {
      {"wigner  beta=2 N=2  g=0.1", Observable::wigner, 2, 2, 0.1},
      {"wigner  beta=1 N=8  g=0.5", Observable::wigner, 1, 8, 0.5},
      {"proper  beta=2 N=4  g=1  ", Observable::proper, 2, 4, 1.0},
      {"partial beta=2 N=2  g=0.1", Observable::partial, 2, 2, 0.1},
  };
  std::printf("samples=%llu workers=%d\n", static_cast<unsigned long long>(samples), workers);
  std::printf("%-28s %10s %10s %8s %s\n", "workload", "serial s", "omp s", "speedup", "identical");
  bool all_same = true;
  for (const Case& c : cases) {
    SampleRequest req;
    req.observable = c.obs;
    req.beta = c.beta;
    req.channels = c.n;
    req.coupling = CouplingSpec::from_g(c.g);
    req.samples = samples;
    req.seed = 42;
    std::optional<SampleResult> a, b;
    const double ts = time_it([&] { a = run_serial(req); });
    const double tp = time_it([&] { b = run_parallel(req, workers); });
    const bool same = a->batch.values == b->batch.values && a->histogram == b->histogram;
    all_same = all_same && same;
    std::printf("%-28s %10.3f %10.3f %8.2f %s\n", c.label, ts, tp, ts / tp, same ? "yes" : "NO");
  }
  {
    const std::vector<double> p{0.1, 1.0, 10.0};
    std::vector<ZEstimate> a, b;
    const std::uint64_t m = samples / 4;
    const double ts = time_it([&] { a = z_ratio_mc(2, 0.1, p, m, 42, 1); });
    const double tp = time_it([&] { b = z_ratio_mc(2, 0.1, p, m, 42, workers); });
    bool same = true;
    for (std::size_t i = 0; i < p.size(); ++i) same = same && a[i].z_ratio == b[i].z_ratio && a[i].se == b[i].se;
    all_same = all_same && same;
    std::printf("%-28s %10.3f %10.3f %8.2f %s\n", "z_ratio_mc N=2 g=0.1 (M/4)", ts, tp, ts / tp, same ? "yes" : "NO");
  }
  return all_same ? 0 : 1;
}
