#include "tdelay/ensembles.hpp"

#include <string>

#include "tdelay/errors.hpp"

namespace tdelay {

SymmetryClass::SymmetryClass(int beta, BetaContext ctx) : beta_(beta) {
  const bool ok = beta == 1 || beta == 2 || (beta == 4 && ctx == BetaContext::formula);
  if (!ok) {
    if (beta == 4) throw UnsupportedSymmetry("beta=4 matrix sampling is not supported");
    throw DomainError("symmetry index must be 1, 2 or 4, got " + std::to_string(beta));
  }
}

UnitaryMatrix haar_unitary(int n, RngStream& rng) {
  if (n < 1) throw DomainError("haar_unitary: N must be positive");
  CMatrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int k = 0; k < n; ++k) {
    const cplx d = r(k, k);
    const double m = std::abs(d);
    q.col(k) *= (m > 0.0 ? d / m : cplx(1.0));
  }
  return UnitaryMatrix(std::move(q));
}

UnitaryMatrix sample_scattering_perfect(SymmetryClass beta, int n, RngStream& rng) {
  if (beta.beta() == 4) throw UnsupportedSymmetry("beta=4 matrix sampling is not supported");
  UnitaryMatrix u = haar_unitary(n, rng);
  if (beta.beta() == 2) return u;
  CMatrix s = u.matrix() * u.matrix().transpose();
  return UnitaryMatrix(std::move(s));
}

HermitianMatrix sample_inverse_ws_perfect(SymmetryClass beta, int n, RngStream& rng) {
  if (n < 1) throw DomainError("sample_inverse_ws_perfect: N must be positive");
  if (beta.beta() == 2) {
    CMatrix x(n, 2 * n);
    for (int j = 0; j < 2 * n; ++j)
      for (int i = 0; i < n; ++i) x(i, j) = rng.complex_normal();
    return HermitianMatrix(x * x.adjoint(), true);
  }
  if (beta.beta() == 1) {
    Eigen::MatrixXd x(n, 2 * n + 1);
    for (int j = 0; j < 2 * n + 1; ++j)
      for (int i = 0; i < n; ++i) x(i, j) = rng.normal();
    const Eigen::MatrixXd g = x * x.transpose();
    return HermitianMatrix(g.cast<cplx>(), true);
  }
  throw UnsupportedSymmetry("beta=4 matrix sampling is not supported");
}

HermitianMatrix cayley_reaction(const UnitaryMatrix& s) {
  const Eigen::Index n = s.size();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix plus = id + s.matrix();
  Eigen::JacobiSVD<CMatrix> svd(plus);
  if (svd.singularValues()(n - 1) < 1e-8) throw SingularMatrix("cayley_reaction: eigenphase too close to pi");
  const CMatrix k = cplx(0.0, -1.0) * plus.partialPivLu().solve(id - s.matrix());
  return HermitianMatrix(hermitian_part(k));
}

}  // namespace tdelay
