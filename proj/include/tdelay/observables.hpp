#pragma once

#include <string>
#include <vector>

#include "tdelay/coupling.hpp"

namespace tdelay {

enum class DelayKind { wigner, proper, partial, heuristic };

std::string to_string(DelayKind kind);
DelayKind delay_kind_from_string(const std::string& name);

struct TimeDelayBatch {
  DelayKind kind = DelayKind::wigner;
  int beta = 2;
  int channels = 1;
  double g = 1.0;  // coupling the batch was drawn at
  std::vector<double> values;
};

// tr(Q_s)/N; throws InvariantViolation for a non-positive trace.
double wigner_time(const HermitianMatrix& q_s);

// Eigenvalues of Q_s, ascending.
std::vector<double> proper_times(const HermitianMatrix& q_s);

// Diagonal of Q_s in the eigenbasis of S (energy derivatives of the
// eigenphases). The eigenbasis comes from the reaction matrix of a rotated
// copy e^{i alpha} S, so no eigenphase sits at the Cayley singularity.
std::vector<double> partial_times(const CavitySample& sample);

// tau0 / (gbar + sqrt(gbar^2-1) cos theta), theta uniform, tau0 the
// reciprocal of a Gamma(1 + beta N/2, rate beta/2) variate.
double sample_partial_cheap(int beta, int n, const CouplingSpec& spec, RngStream& rng);

// Width y with density (bN/2)^{bN/2}/Gamma(bN/2) y^{bN/2-1} e^{-bN y/2}.
double sample_resonance_width(int beta, int n, RngStream& rng);

// Single isolated resonance: Gamma = N T y, E uniform on [-pi, pi],
// tau = Gamma / (N (E^2 + Gamma^2/4)).
double sample_heuristic(int beta, int n, double transmission, RngStream& rng);

enum class RescaleMode { t, s };

// mode t: tau -> 2 tau / (beta g); mode s: tau -> N |1/g - g| tau for proper
// and partial times, |1/g - g| tau for the Wigner time.
double rescale_factor(const TimeDelayBatch& batch, RescaleMode mode);
TimeDelayBatch rescale(const TimeDelayBatch& batch, RescaleMode mode);

}  // namespace tdelay
