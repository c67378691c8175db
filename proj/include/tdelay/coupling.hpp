#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tdelay/ensembles.hpp"

namespace tdelay {

// Uniform coupling constant. Stored canonically in (0, 1] using g <-> 1/g;
// the value supplied by the caller is kept for reporting.
class CouplingSpec {
 public:
  static CouplingSpec from_g(double g);
  static CouplingSpec from_transmission(double t);

  double g() const { return g_; }
  double transmission() const;
  double mean_amplitude() const { return (1.0 - g_) / (1.0 + g_); }
  // 2/T - 1 = (g + 1/g) / 2
  double gbar() const { return 0.5 * (g_ + 1.0 / g_); }
  // sqrt(gbar^2 - 1) = (1/g - g) / 2
  double gbar_root() const { return 0.5 * (1.0 / g_ - g_); }
  bool perfect() const { return g_ == 1.0; }

  double input_value() const { return input_; }
  bool given_as_transmission() const { return input_is_t_; }

 private:
  CouplingSpec(double g, double input, bool is_t) : g_(g), input_(input), input_is_t_(is_t) {}
  double g_;
  double input_;
  bool input_is_t_;
};

struct CavitySample {
  UnitaryMatrix S;
  HermitianMatrix Q_s;  // symmetrised Wigner-Smith matrix
};

// sqrt(2g) [(1+g^2) I + (1-g^2) H]^{-1/2}, H = (S0 + S0^dagger)/2.
HermitianMatrix coupling_matrix_A(const UnitaryMatrix& s0, double g);

// (Sbar I + S0)(I + Sbar S0)^{-1}
UnitaryMatrix transform_scattering(const UnitaryMatrix& s0, const CouplingSpec& spec);

// Draws S0, then the Laguerre matrix, from the same stream in that order.
CavitySample build_sample(SymmetryClass beta, int n, const CouplingSpec& spec, RngStream& rng);

// Same draws as build_sample, returning only tr(Q_s)/N:
// (2g/N) tr(Gamma0^{-1} M^{-1}), M = (1+g^2) I + (1-g^2) H.
// g is used as given (no canonicalisation).
double sample_wigner_time(SymmetryClass beta, int n, double g, RngStream& rng);

// Non-uniform coupling g_a with channel rotation u_c. Near-singular Cayley
// draws are redrawn from the same stream and counted in *resamples.
CavitySample build_sample_general(SymmetryClass beta, int n, std::span<const double> g_a,
                                  const UnitaryMatrix& u_c, RngStream& rng,
                                  std::uint64_t* resamples = nullptr);

// Eigenphases -2 atan(g k_a) of (I - igK)(I + igK)^{-1}, in eigenvalue order of K.
std::vector<double> eigenphases(const HermitianMatrix& k, double g);

}  // namespace tdelay
