#include "tdelay/coupling.hpp"

#include <cmath>
#include <string>

#include "tdelay/errors.hpp"

namespace tdelay {

CouplingSpec CouplingSpec::from_g(double g) {
  if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("coupling g must be positive and finite");
  return CouplingSpec(g > 1.0 ? 1.0 / g : g, g, false);
}

CouplingSpec CouplingSpec::from_transmission(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("transmission must lie in (0, 1]");
  // Smaller root of T g^2 - (4 - 2T) g + T = 0, written without cancellation.
  const double g = t == 1.0 ? 1.0 : t / (2.0 - t + 2.0 * std::sqrt(1.0 - t));
  return CouplingSpec(g, t, true);
}

double CouplingSpec::transmission() const { return 4.0 * g_ / ((1.0 + g_) * (1.0 + g_)); }

HermitianMatrix coupling_matrix_A(const UnitaryMatrix& s0, double g) {
  if (!(g > 0.0)) throw DomainError("coupling_matrix_A: g must be positive");
  const Eigen::Index n = s0.size();
  if (g == 1.0) return HermitianMatrix(CMatrix::Identity(n, n), true);
  const HermitianMatrix h(hermitian_part(s0.matrix()));
  const double g2 = g * g;
  return matrix_function_hermitian(h, [&](double lam) {
    return std::sqrt(2.0 * g / ((1.0 + g2) + (1.0 - g2) * lam));
  });
}

UnitaryMatrix transform_scattering(const UnitaryMatrix& s0, const CouplingSpec& spec) {
  const double sbar = spec.mean_amplitude();
  if (sbar == 0.0) return s0;
  const Eigen::Index n = s0.size();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix num = sbar * id + s0.matrix();
  const CMatrix den = id + sbar * s0.matrix();
  // num and den commute, so num * den^{-1} = den^{-1} * num.
  CMatrix s = den.partialPivLu().solve(num);
  return UnitaryMatrix(std::move(s));
}

CavitySample build_sample(SymmetryClass beta, int n, const CouplingSpec& spec, RngStream& rng) {
  UnitaryMatrix s0 = sample_scattering_perfect(beta, n, rng);
  const HermitianMatrix gamma0 = sample_inverse_ws_perfect(beta, n, rng);
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix q0 = gamma0.matrix().llt().solve(id);
  if (spec.perfect()) return {std::move(s0), HermitianMatrix(hermitian_part(q0), true)};
  const HermitianMatrix a = coupling_matrix_A(s0, spec.g());
  const CMatrix q = a.matrix() * q0 * a.matrix();
  return {transform_scattering(s0, spec), HermitianMatrix(hermitian_part(q), true)};
}

double sample_wigner_time(SymmetryClass beta, int n, double g, RngStream& rng) {
  if (!(g > 0.0)) throw DomainError("sample_wigner_time: g must be positive");
  const UnitaryMatrix s0 = sample_scattering_perfect(beta, n, rng);
  const HermitianMatrix gamma0 = sample_inverse_ws_perfect(beta, n, rng);
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix q0 = gamma0.matrix().llt().solve(id);
  if (g == 1.0) return q0.trace().real() / n;
  const double g2 = g * g;
  const CMatrix m = (1.0 + g2) * id + (1.0 - g2) * hermitian_part(s0.matrix());
  const CMatrix minv = m.llt().solve(id);
  // tr(Q0 M^{-1}) without forming the product
  const double tr = (q0.transpose().array() * minv.array()).sum().real();
  return 2.0 * g * tr / n;
}

CavitySample build_sample_general(SymmetryClass beta, int n, std::span<const double> g_a,
                                  const UnitaryMatrix& u_c, RngStream& rng, std::uint64_t* resamples) {
  if (static_cast<int>(g_a.size()) != n) throw DomainError("build_sample_general: need one g per channel");
  if (u_c.size() != n) throw DomainError("build_sample_general: channel rotation has wrong size");
  for (double g : g_a)
    if (!(g > 0.0)) throw DomainError("build_sample_general: couplings must be positive");
  if (beta.beta() == 1 && max_abs(CMatrix(u_c.matrix().imag().cast<cplx>())) > 1e-12)
    throw DomainError("build_sample_general: beta=1 needs a real orthogonal channel rotation");

  UnitaryMatrix s0;
  HermitianMatrix k;
  for (;;) {
    s0 = sample_scattering_perfect(beta, n, rng);
    try {
      k = cayley_reaction(s0);
      break;
    } catch (const SingularMatrix&) {
      if (resamples) ++*resamples;
    }
  }
  const HermitianMatrix gamma0 = sample_inverse_ws_perfect(beta, n, rng);

  const CMatrix id = CMatrix::Identity(n, n);
  RVector c(n);
  for (int a = 0; a < n; ++a) c(a) = std::sqrt(g_a[static_cast<std::size_t>(a)]);
  const CMatrix ckc = c.asDiagonal() * k.matrix() * c.asDiagonal();

  const HermitianMatrix left =
      matrix_function_hermitian(HermitianMatrix(ckc), [](double x) { return 1.0 / std::sqrt(1.0 + x * x); });
  const HermitianMatrix right = matrix_function_hermitian(k, [](double x) { return std::sqrt(1.0 + x * x); });
  const CMatrix a = u_c.matrix().adjoint() * left.matrix() * c.asDiagonal() * right.matrix();

  const CMatrix q0 = gamma0.matrix().llt().solve(id);
  const CMatrix q = a * q0 * a.adjoint();

  const cplx i1(0.0, 1.0);
  const CMatrix inner = (id + i1 * ckc).partialPivLu().solve(id - i1 * ckc);
  CMatrix s = u_c.matrix().adjoint() * inner * u_c.matrix();
  return {UnitaryMatrix(std::move(s)), HermitianMatrix(hermitian_part(q), true)};
}

std::vector<double> eigenphases(const HermitianMatrix& k, double g) {
  const RVector ev = hermitian_eigenvalues(k);
  std::vector<double> out(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index a = 0; a < ev.size(); ++a) out[static_cast<std::size_t>(a)] = -2.0 * std::atan(g * ev(a));
  return out;
}

}  // namespace tdelay
