#include "tdelay/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include "tdelay/errors.hpp"

namespace tdelay {

namespace {

#ifdef NDEBUG
std::atomic<bool> g_checks{false};
#else
std::atomic<bool> g_checks{true};
#endif

}  // namespace

void set_invariant_checks(bool enabled) { g_checks.store(enabled, std::memory_order_relaxed); }
bool invariant_checks() { return g_checks.load(std::memory_order_relaxed); }

double max_abs(const CMatrix& m) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(m(i, j)));
  return r;
}

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

UnitaryMatrix::UnitaryMatrix(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DomainError("unitary matrix must be square");
  if (invariant_checks()) {
    const Eigen::Index n = m_.rows();
    const double r = max_abs(m_.adjoint() * m_ - CMatrix::Identity(n, n));
    if (!(r < 1e-10)) throw InvariantViolation("unitarity residual " + std::to_string(r));
  }
}

HermitianMatrix::HermitianMatrix(const CMatrix& m, bool positive_definite)
    : positive_definite_(positive_definite) {
  if (m.rows() != m.cols()) throw DomainError("hermitian matrix must be square");
  if (invariant_checks()) {
    const double scale = std::max(1.0, max_abs(m));
    const double r = max_abs(m - m.adjoint());
    if (!(r < 1e-12 * scale)) throw InvariantViolation("hermiticity residual " + std::to_string(r));
  }
  m_ = hermitian_part(m);
  if (positive_definite_ && invariant_checks()) {
    Eigen::LLT<CMatrix> llt(m_);
    if (llt.info() != Eigen::Success) throw InvariantViolation("matrix flagged positive definite is not");
  }
}

Eigensystem hermitian_eigensystem(const HermitianMatrix& h) {
  const Eigen::Index n = h.size();
  CMatrix a = h.matrix();
  CMatrix v = CMatrix::Identity(n, n);

  const double norm = a.norm();
  const double tol = 1e-30 * norm * norm;
  int sweep = 0;
  for (;; ++sweep) {
    double off = 0.0;
    for (Eigen::Index q = 1; q < n; ++q)
      for (Eigen::Index p = 0; p < q; ++p) off += std::norm(a(p, q));
    if (off <= tol || off == 0.0) break;
    if (sweep >= 100) throw ConvergenceError("jacobi: no convergence after 100 sweeps");

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Skip elements already negligible against both diagonal entries.
        if (sweep > 3 && std::abs(app) + 1e18 * mag == std::abs(app) &&
            std::abs(aqq) + 1e18 * mag == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const cplx phase = apq / mag;  // e^{i phi}
        const double theta = (aqq - app) / (2.0 * mag);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx ph_conj = std::conj(phase);

        // a <- a V2 on columns p, q; V2 = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - s * ph_conj * akq;
          a(k, q) = s * akp + c * ph_conj * akq;
        }
        // a <- V2^dagger a on rows p, q
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp - s * ph_conj * vkq;
          v(k, q) = s * vkp + c * ph_conj * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });
  Eigensystem out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

RVector hermitian_eigenvalues(const HermitianMatrix& h) {
  if (h.size() == 1) return RVector::Constant(1, h.matrix()(0, 0).real());
  if (h.size() == 2) {
    const CMatrix& m = h.matrix();
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double half_gap = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
    const double mid = 0.5 * (a + d);
    RVector out(2);
    // Larger-magnitude root first, smaller one from the determinant.
    const double det = a * d - std::norm(m(0, 1));
    if (mid >= 0.0) {
      out(1) = mid + half_gap;
      out(0) = out(1) != 0.0 ? det / out(1) : 0.0;
    } else {
      out(0) = mid - half_gap;
      out(1) = det / out(0);
    }
    if (out(0) > out(1)) std::swap(out(0), out(1));
    return out;
  }
  return hermitian_eigensystem(h).values;
}

HermitianMatrix matrix_function_hermitian(const HermitianMatrix& h, const std::function<double(double)>& f) {
  const Eigensystem es = hermitian_eigensystem(h);
  RVector fv(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    fv(k) = f(es.values(k));
    if (!std::isfinite(fv(k)))
      throw DomainError("matrix function not finite at eigenvalue " + std::to_string(es.values(k)));
  }
  const CMatrix out = es.vectors * fv.asDiagonal() * es.vectors.adjoint();
  return HermitianMatrix(out);
}

}  // namespace tdelay
