#pragma once

#include <cstdint>
#include <vector>

#include "mm/laurent.hpp"
#include "mm/lattice.hpp"

namespace mm {

enum class MeasureMethod { univariate_exact, iterated_quadrature, monte_carlo };

const char* measure_method_name(MeasureMethod m);

// Logarithmic Mahler measure value (nats) with a method tag, an error
// estimate, and the work that produced it.
struct MeasureResult {
  double value = 0.0;
  MeasureMethod method = MeasureMethod::univariate_exact;
  double error_estimate = 0.0;
  long long grid = 0;
  long long samples = 0;
  long long roots = 0;
};

// Roots of a dense univariate polynomial (coefficients low to high, leading
// coefficient nonzero) via a balanced companion matrix.
std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs);

// m(P) = log|leading coeff| + sum log max(|root|, 1), after stripping the
// monomial factor. Exact up to root-finding accuracy.
MeasureResult measure_univariate_exact(const LaurentPoly& p);

// Uniform periodic grid over the outer n-1 variables; the innermost variable
// (the one maximizing k_i) is integrated exactly by Jensen's formula at each
// node. Degenerate fibers are skipped; more than 1% of them aborts.
MeasureResult measure_iterated(const LaurentPoly& p, int grid_per_dim);

// Mean of log|P| over `samples` uniform torus points from the counter-based
// generator; error_estimate is 3x the sample standard error (the integrand is
// heavy-tailed near zeros of P, so this is indicative, not rigorous).
MeasureResult measure_mc(const LaurentPoly& p, long long samples, std::uint64_t seed);

// univariate-exact when n == 1, iterated quadrature otherwise.
MeasureResult measure_auto(const LaurentPoly& p, int grid_per_dim, long long samples,
                           std::uint64_t seed, bool prefer_mc = false);

// Monte Carlo estimate of mu_n(S(P,r)) with a 99% binomial (Wilson) interval.
struct SublevelEstimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long long samples = 0;
};

SublevelEstimate sublevel_measure(const LaurentPoly& p, double r, long long samples,
                                  std::uint64_t seed);

// Integrands over the torus against mu_A (A = identity when null).
struct TorusIntegrand {
  enum class Kind { log_abs, log_abs_squared, regularized, indicator_below };
  Kind kind = Kind::log_abs;
  double param = 0.0;  // epsilon for regularized, r for indicator_below
  LaurentPoly target;

  static TorusIntegrand log_abs(LaurentPoly p) { return {Kind::log_abs, 0.0, std::move(p)}; }
  static TorusIntegrand log_abs_squared(LaurentPoly p) {
    return {Kind::log_abs_squared, 0.0, std::move(p)};
  }
  static TorusIntegrand regularized(LaurentPoly p, double eps) {
    return {Kind::regularized, eps, std::move(p)};
  }
  static TorusIntegrand indicator_below(LaurentPoly p, double r) {
    return {Kind::indicator_below, r, std::move(p)};
  }
};

struct IntegrateOptions {
  int grid = 256;
  long long samples = 1'000'000;
  std::uint64_t seed = 1;
  bool monte_carlo = false;
};

// Integral of f against mu_A, computed by substituting z^A first and then
// integrating over T^m. For kind log_abs this returns m(P_A).
double integrate(const TorusIntegrand& f, const SubstMatrix* a, const IntegrateOptions& opt);

// Counter-based uniform generator: reproducible from (seed, counter) alone.
double uniform01(std::uint64_t seed, std::uint64_t counter);

}  // namespace mm
