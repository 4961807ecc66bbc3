#pragma once

#include <vector>

#include "mm/laurent.hpp"
#include "mm/lattice.hpp"

namespace mm {

// P_d(z1,z2) = sum_{0 <= i+j <= d} z1^i z2^j, with (d+1)(d+2)/2 terms.
LaurentPoly pd_polynomial(int d);

// The 4-variable limit polynomial (1-z1)(1-z2) - (1-z3)(1-z4), expanded.
LaurentPoly p_infinity_polynomial();

// M_d = [d+2 0 1 0; 0 1 0 d+2], the 2x4 substitution matrix with
// rho(M_d) = d+2 and m((P_inf)_{M_d}) = m(P_d).
SubstMatrix md_matrix(int d);

// m(P_d) by the closed dilogarithm formula: two O(d) sums of Bloch-Wigner
// values at roots of unity.
double mpd_exact(int d);

// lim m(P_d) = 9 zeta(3) / (2 pi^2) = -18 zeta'(-2).
double m_p_infinity();

// Coefficients of the asymptotic expansion
//   m(P_d) - m(P_inf) ~ (1/((d+1)(d+2))) [ -log(d)/2 + sum_k alpha_k / d^k ]
// together with the constants they are built from.
struct ExpansionCoeffs {
  int K = 0;
  std::vector<double> alpha;      // alpha_0 .. alpha_K
  std::vector<double> bernoulli;  // B_0 .. B_{2K+2}
  double zeta3 = 0.0;
  double zetap_minus1 = 0.0;
  double zetap_minus2 = 0.0;
  double log_2pi = 0.0;
};

ExpansionCoeffs expansion_coeffs(int K);  // K <= 40

// Truncated expansion value m(P_inf) + (−log(d)/2 + sum_{k<=K} alpha_k/d^k) / ((d+1)(d+2)).
double mpd_asymptotic(int d, int K);

// Verifies the polynomial identity
//   P_d (1-z1)(1-z2)(z1-z2) = (1-z1^{d+2})(1-z2) - (1-z1)(1-z2^{d+2})
// exactly in sparse arithmetic, and that quadrature on (P_inf)_{M_d} agrees
// with the closed formula. Returns false on mismatch (implementation bug).
bool substitution_identity_check(int d, int grid = 1024);

}  // namespace mm
