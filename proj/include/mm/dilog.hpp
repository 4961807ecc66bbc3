#pragma once

#include <complex>

#include "mm/laurent.hpp"

namespace mm {

// Exact Bernoulli number B_m (B_1 = -1/2 convention) as a reduced fraction.
// Computed once by the defining recurrence in 128-bit rational arithmetic.
struct Rational64 {
  long long num = 0;
  long long den = 1;
};

double bernoulli(int m);          // as double, m <= 44
Rational64 bernoulli_exact(int m);  // m <= 34 (numerator fits 64 bits there)

// Verifies sum_{j=0}^{m} binom(m+1, j) B_j = 0 exactly in the rational
// domain for every 1 <= m <= max_m.
bool bernoulli_recurrence_exact(int max_m);

// zeta(2j) with the convention zeta(0) = -1/2 (as it enters the expansion
// coefficients); j <= 40.
double zeta_even(int j);

// Clausen function Cl_2(theta) = -int_0^theta log|2 sin(t/2)| dt; equals the
// Bloch-Wigner dilogarithm on the unit circle: D(e^{i theta}) = Cl_2(theta).
double clausen2(double theta);

// Principal-branch dilogarithm Li_2 for complex argument, via inversion and
// reflection onto |z| <= 1, Re z <= 1/2 and a Bernoulli series in -log(1-z).
Complex li2(Complex z);

// Bloch-Wigner dilogarithm D(z) = Im(Li_2(z)) + arg(1-z) log|z|; single
// valued, vanishes on the real axis, odd under conjugation.
double bloch_wigner(Complex z);

// frozen constants (30 significant digits where irrational)
double zeta3();          // zeta(3)
double glaisher();       // Glaisher-Kinkelin A
double zetap_minus1();   // zeta'(-1) = 1/12 - log A
double zetap_minus2();   // zeta'(-2) = -zeta(3)/(4 pi^2)

}  // namespace mm
