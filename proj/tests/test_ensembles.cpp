#include "catch_amalgamated.hpp"

#include <cmath>

#include "tdelay/ensembles.hpp"
#include "tdelay/errors.hpp"

using namespace tdelay;
using Catch::Approx;

TEST_CASE("symmetry class admits beta = 4 only for formulas") {
  CHECK_NOTHROW(SymmetryClass(1));
  CHECK_NOTHROW(SymmetryClass(2));
  CHECK_THROWS_AS(SymmetryClass(4), UnsupportedSymmetry);
  CHECK(SymmetryClass(4, BetaContext::formula).beta() == 4);
  CHECK_THROWS_AS(SymmetryClass(3, BetaContext::formula), DomainError);
}

TEST_CASE("Haar unitaries are unitary and have CUE moments") {
  set_invariant_checks(true);
  const int n = 3, draws = 40000;
  RngStream r(21, 0);
  double m2 = 0, m4 = 0;
  cplx tr = 0;
  for (int i = 0; i < draws; ++i) {
    const UnitaryMatrix u = haar_unitary(n, r);
    const double a = std::norm(u.matrix()(0, 1));
    m2 += a;
    m4 += a * a;
    tr += u.matrix().trace();
  }
  // E|U_ij|^2 = 1/N, E|U_ij|^4 = 2/(N(N+1)), E tr U = 0
  CHECK(m2 / draws == Approx(1.0 / n).margin(0.005));
  CHECK(m4 / draws == Approx(2.0 / (n * (n + 1))).margin(0.005));
  CHECK(std::abs(tr) / draws < 0.02);
}

TEST_CASE("COE matrices are symmetric unitaries") {
  RngStream r(22, 0);
  for (int i = 0; i < 50; ++i) {
    const UnitaryMatrix s = sample_scattering_perfect(SymmetryClass(1), 4, r);
    CHECK(max_abs(s.matrix() - s.matrix().transpose()) < 1e-12);
  }
}

TEST_CASE("Laguerre matrices have the Wishart mean") {
  // E[X X^dagger]_ii = number of columns: 2N (beta = 2), 2N + 1 (beta = 1)
  const int n = 3, draws = 20000;
  for (int beta : {1, 2}) {
    RngStream r(23, static_cast<std::uint64_t>(beta));
    double diag = 0, off = 0;
    for (int i = 0; i < draws; ++i) {
      const HermitianMatrix g = sample_inverse_ws_perfect(SymmetryClass(beta), n, r);
      REQUIRE(g.positive_definite());
      diag += g.matrix()(1, 1).real();
      off += g.matrix()(0, 2).real();
      if (beta == 1) REQUIRE(max_abs(CMatrix(g.matrix().imag().cast<cplx>())) == 0.0);
    }
    const double cols = beta == 2 ? 2.0 * n : 2.0 * n + 1;
    CHECK(diag / draws == Approx(cols).margin(4 * std::sqrt(2 * cols / draws)));
    CHECK(off / draws == Approx(0).margin(0.1));
  }
}

TEST_CASE("Cayley reaction matrix is Hermitian and inverts back to S") {
  RngStream r(24, 0);
  const cplx i1(0, 1);
  for (int beta : {1, 2})
    for (int k = 0; k < 30; ++k) {
      const UnitaryMatrix s = sample_scattering_perfect(SymmetryClass(beta), 4, r);
      const HermitianMatrix kk = cayley_reaction(s);
      const CMatrix id = CMatrix::Identity(4, 4);
      const CMatrix back = (id + i1 * kk.matrix()).inverse() * (id - i1 * kk.matrix());
      CHECK(max_abs(back - s.matrix()) < 1e-9);
    }
  CMatrix minus = -CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(cayley_reaction(UnitaryMatrix(minus)), SingularMatrix);
}
