#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace tdelay {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

// Structural checks on UnitaryMatrix / HermitianMatrix construction. On by
// default in builds without NDEBUG; tests switch them on explicitly.
void set_invariant_checks(bool enabled);
bool invariant_checks();

double max_abs(const CMatrix& m);

// (m + m^dagger) / 2
CMatrix hermitian_part(const CMatrix& m);

class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;
  explicit UnitaryMatrix(CMatrix m);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index size() const { return m_.rows(); }

 private:
  CMatrix m_;
};

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  // The input is expected to be Hermitian to roundoff; the stored matrix is
  // its exact Hermitian part.
  explicit HermitianMatrix(const CMatrix& m, bool positive_definite = false);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index size() const { return m_.rows(); }
  bool positive_definite() const { return positive_definite_; }

 private:
  CMatrix m_;
  bool positive_definite_ = false;
};

struct Eigensystem {
  RVector values;   // ascending
  CMatrix vectors;  // columns are eigenvectors
};

// Cyclic complex Jacobi. Throws ConvergenceError after 100 sweeps.
Eigensystem hermitian_eigensystem(const HermitianMatrix& h);
RVector hermitian_eigenvalues(const HermitianMatrix& h);

// V f(diag lambda) V^dagger. Throws DomainError if f is not finite on the spectrum.
HermitianMatrix matrix_function_hermitian(const HermitianMatrix& h, const std::function<double(double)>& f);

}  // namespace tdelay
