#pragma once

#include "tdelay/linalg.hpp"
#include "tdelay/rng.hpp"

namespace tdelay {

enum class BetaContext { matrix, formula };

// Dyson index. Matrix samplers accept 1 and 2; formula-only consumers also 4.
class SymmetryClass {
 public:
  explicit SymmetryClass(int beta, BetaContext ctx = BetaContext::matrix);
  int beta() const { return beta_; }
  double value() const { return beta_; }

 private:
  int beta_;
};

UnitaryMatrix haar_unitary(int n, RngStream& rng);

// beta=2: Haar unitary. beta=1: U U^T.
UnitaryMatrix sample_scattering_perfect(SymmetryClass beta, int n, RngStream& rng);

// Laguerre matrix X X^dagger: beta=2 uses an n x 2n complex Gaussian X with
// E|x|^2 = 1, beta=1 an n x (2n+1) real standard Gaussian X.
HermitianMatrix sample_inverse_ws_perfect(SymmetryClass beta, int n, RngStream& rng);

// K = -i (I + S)^{-1} (I - S). Throws SingularMatrix when I + S has a
// singular value below 1e-8.
HermitianMatrix cayley_reaction(const UnitaryMatrix& s);

}  // namespace tdelay
