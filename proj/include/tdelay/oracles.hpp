#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tdelay {

struct GridFunction {
  std::string quantity;
  int beta = 2;
  int channels = 1;
  double gbar = 1.0;
  std::vector<double> x;
  std::vector<double> value;
};

// Abscissae from "log:lo:hi:count" / "lin:lo:hi:count" (count + 1 points).
std::vector<double> parse_grid_spec(const std::string& spec);

// --- moments at perfect coupling (beta N > 2 required) ---
double var_wigner_perfect(int beta, int n);
double var_partial_perfect(int beta, int n);
double cov_partial_perfect(int beta, int n);
double var_proper_perfect(int beta, int n);
double cov_proper_perfect(int beta, int n);

// --- beta = 2 moments at transmission T, N >= 2 ---
double var_wigner_unitary(int n, double t);
double var_partial_unitary(int n, double t);
double cov_partial_unitary(int n, double t);

// chi-square law of the rescaled resonance width
double resonance_width_pdf(int beta, int n, double y);

// partial time at perfect coupling
double pdf_partial_perfect(int beta, int n, double tau);

// partial time at gbar = 2/T - 1, by adaptive quadrature over the phase
double pdf_partial(int beta, int n, double gbar, double tau);
double cdf_partial(int beta, int n, double gbar, double tau);
GridFunction pdf_partial_grid(int beta, int n, double gbar, const std::vector<double>& tau);

// Density of t = 4 sqrt(gbar^2-1) tau / beta in the limit gbar -> infinity.
double pdf_partial_weak(int beta, int n, double t);
// beta = 2 finite-sum form of the same density
double pdf_partial_weak_sum(int n, double t);

// beta = 2 partial-time density from the derivative formula, evaluated with
// truncated Taylor series in 113-bit arithmetic. n <= 16.
double pdf_partial_unitary_exact(int n, double gbar, double tau);

// beta = 2 proper-time marginal density. n <= 5, gbar <= 100.
double pdf_proper_unitary_exact(int n, double gbar, double tau);

// Polynomial F_n(g, w) = sum_m (D^m g^n)/(2m+1)!, D = d^2/dg^2 - 2 w d/dg,
// as exact rational coefficients: entries {g power, w power, num, den}.
struct PolyTerm {
  int g_power;
  int w_power;
  long long num;
  long long den;
};
std::vector<PolyTerm> proper_f_polynomial(int n);
double eval_poly(const std::vector<PolyTerm>& p, double g, double w);

struct TailCoefficients {
  double a, b, c_tilde;
  std::optional<double> c;  // beta = 2 only
};
TailCoefficients tail_coefficients(int beta, int n);

struct Cutoffs {
  double t_low, t_low_partial, t_up;
};
Cutoffs cutoffs(int beta, int n, double gbar);
double wigner_crossover(int n, double g);

struct LeftTailPrefactor {
  double a_n;  // Barnes-G amplitude of Z(p) at large p
  double b_n;  // Gamma-determinant ratio
  double c_n;  // amplitude of P(t) ~ C_N t^{-N^2-3/2} e^{-N/t}
  double power;  // N^2 + 3/2
  double rate;   // N
};
LeftTailPrefactor left_tail_prefactor_unitary(int n);

struct LargeDeviationExponents {
  double left_power, left_rate, far_power;
  std::optional<double> perfect_left_power, perfect_left_rate;  // g = 1 only
};
LargeDeviationExponents large_dev_exponents(int beta, int n, double g);

// int_{R^N} |Delta(x)|^beta prod_i (1 + x_i^2)^{-alpha} dx
double selberg_cauchy_norm(int n, double alpha, double beta);

}  // namespace tdelay
