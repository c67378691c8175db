#include "tdelay/observables.hpp"

#include <cmath>
#include <numbers>

#include "tdelay/errors.hpp"

namespace tdelay {

std::string to_string(DelayKind kind) {
  switch (kind) {
    case DelayKind::wigner: return "wigner";
    case DelayKind::proper: return "proper";
    case DelayKind::partial: return "partial";
    case DelayKind::heuristic: return "heuristic";
  }
  return "unknown";
}

DelayKind delay_kind_from_string(const std::string& name) {
  if (name == "wigner") return DelayKind::wigner;
  if (name == "proper") return DelayKind::proper;
  if (name == "partial") return DelayKind::partial;
  if (name == "heuristic") return DelayKind::heuristic;
  throw DomainError("unknown observable '" + name + "'");
}

double wigner_time(const HermitianMatrix& q_s) {
  const double tr = q_s.matrix().trace().real();
  if (!(tr > 0.0)) throw InvariantViolation("Wigner time: non-positive trace");
  return tr / static_cast<double>(q_s.size());
}

std::vector<double> proper_times(const HermitianMatrix& q_s) {
  const RVector ev = hermitian_eigenvalues(q_s);
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> partial_times(const CavitySample& sample) {
  const Eigen::Index n = sample.S.size();
  for (int attempt = 0; attempt <= 2 * n + 2; ++attempt) {
    const double alpha = 0.7 * attempt;
    try {
      const UnitaryMatrix rotated(sample.S.matrix() * std::polar(1.0, alpha));
      const Eigensystem es = hermitian_eigensystem(cayley_reaction(rotated));
      const CMatrix d = es.vectors.adjoint() * sample.Q_s.matrix() * es.vectors;
      std::vector<double> out(static_cast<std::size_t>(n));
      for (Eigen::Index a = 0; a < n; ++a) out[static_cast<std::size_t>(a)] = d(a, a).real();
      return out;
    } catch (const SingularMatrix&) {
    }
  }
  throw SingularMatrix("partial_times: no regular rotation found");
}

double sample_partial_cheap(int beta, int n, const CouplingSpec& spec, RngStream& rng) {
  SymmetryClass(beta, BetaContext::formula);
  if (n < 1) throw DomainError("sample_partial_cheap: N must be positive");
  const double b = beta;
  const double inv_tau0 = rng.gamma(1.0 + 0.5 * b * n, 0.5 * b);
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  const double denom = spec.gbar() + spec.gbar_root() * std::cos(theta);
  return 1.0 / (inv_tau0 * denom);
}

double sample_resonance_width(int beta, int n, RngStream& rng) {
  SymmetryClass(beta, BetaContext::formula);
  const double half = 0.5 * beta * n;
  return rng.gamma(half, half);
}

double sample_heuristic(int beta, int n, double transmission, RngStream& rng) {
  if (!(transmission > 0.0 && transmission <= 1.0)) throw DomainError("sample_heuristic: T must lie in (0, 1]");
  const double y = sample_resonance_width(beta, n, rng);
  const double width = n * transmission * y;
  const double e = std::numbers::pi * (2.0 * rng.uniform() - 1.0);
  return width / (n * (e * e + 0.25 * width * width));
}

double rescale_factor(const TimeDelayBatch& batch, RescaleMode mode) {
  if (mode == RescaleMode::t) return 2.0 / (batch.beta * batch.g);
  if (batch.g == 1.0) throw DomainError("rescale: mode s is undefined at g = 1");
  const double spread = std::abs(1.0 / batch.g - batch.g);
  return batch.kind == DelayKind::wigner ? spread : batch.channels * spread;
}

TimeDelayBatch rescale(const TimeDelayBatch& batch, RescaleMode mode) {
  const double f = rescale_factor(batch, mode);
  TimeDelayBatch out = batch;
  for (double& v : out.values) v *= f;
  return out;
}

}  // namespace tdelay
