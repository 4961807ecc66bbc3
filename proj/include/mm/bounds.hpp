#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mm/laurent.hpp"

namespace mm {

// Right-hand side of the main convergence inequality together with its
// applicability gate rho >= rho0 and the internal quantities that produced it.
struct BoundReport {
  double rho0 = 0.0;
  bool applicable = false;
  double bound_value = 0.0;
  std::vector<std::pair<std::string, double>> components;
};

// rho_0(P) = max(diam+1, 7 diam^2, exp(2(k-1) max(n,5))). Requires k >= 2.
double rho0_constant(const PolyStats& s);

// delta_eps(P) = min(sqrt(eps)/(diam L1), log(4/3)/diam); +infinity for diam 0.
double delta_eps(const PolyStats& s, double eps);

// C1(n,k) = 6k (18 n k^2)^{n-1}
double c1_constant(int n, long long k);

// C2(n,k,alpha) = 12 k^2 (18 n k^2)^{n-1} alpha^{1-n} / (1-alpha)
double c2_constant(int n, long long k, double alpha);

// Sublevel-set volume bound mu_n(S(P,r)) <= C1 alpha^{1-n} (r/Linf)^{(1-alpha)/(kappa-1)},
// clamped to 1. For kappa == 1 the sublevel set is empty below Linf.
double sublevel_bound(const PolyStats& s, double r, double alpha);

// Regularization gap bound C2 eps^{(1-alpha)/(2(k-1))}; requires Linf = 1.
double regularization_bound(const PolyStats& s, double eps, double alpha);

// |log eps| + 2 |log L1| + 3, the sup of |f_eps| on the delta_eps annulus.
double annulus_log_bound(const PolyStats& s, double eps);

// (d+1) 3^d max|f| / exp(delta rho); requires rho >= 2d/(3 delta).
double holomorphic_transfer_bound(int d, double delta, double rho, double max_f);

// 8 (36 e k)^{n-1} log(rho)^n (diam/rho)^{1/(k-1)}, with applicability flag
// rho >= rho0 and the internal alpha/epsilon choices exposed as components.
BoundReport main_error_bound(const PolyStats& s, double rho);

// Exponential-regime bound C / exp(delta rho) for P without torus zeros,
// C = (n+1) 3^n M where M estimates max |(1/2) log(P P*)| + pi/2 over the
// annulus by sampling (non-rigorous; inflated by 1.5). Throws when the
// sampled minimum of |P P*| suggests P nearly vanishes on the annulus.
double exponential_bound(const LaurentPoly& p, double delta, double rho, int d);

}  // namespace mm
