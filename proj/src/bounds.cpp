#include "mm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mm/errors.hpp"
#include "mm/measure.hpp"

namespace mm {

namespace {
constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;
}  // namespace

double rho0_constant(const PolyStats& s) {
  if (s.k < 2) throw precondition_error("rho0 needs k >= 2 (bounds are vacuous for monomials)");
  const double diam = static_cast<double>(s.diam);
  return std::max({diam + 1.0, 7.0 * diam * diam,
                   std::exp(2.0 * static_cast<double>(s.k - 1) * std::max(s.n, 5))});
}

double delta_eps(const PolyStats& s, double eps) {
  if (!(eps > 0.0)) throw precondition_error("delta_eps needs eps > 0");
  if (s.diam == 0) return std::numeric_limits<double>::infinity();
  const double diam = static_cast<double>(s.diam);
  return std::min(std::sqrt(eps) / (diam * s.l1), std::log(4.0 / 3.0) / diam);
}

double c1_constant(int n, long long k) {
  if (n < 1 || k < 2) throw precondition_error("c1 needs n >= 1, k >= 2");
  const double kd = static_cast<double>(k);
  return 6.0 * kd * std::pow(18.0 * n * kd * kd, n - 1);
}

double c2_constant(int n, long long k, double alpha) {
  if (n < 1 || k < 2) throw precondition_error("c2 needs n >= 1, k >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw precondition_error("alpha must be in (0,1)");
  const double kd = static_cast<double>(k);
  return 12.0 * kd * kd * std::pow(18.0 * n * kd * kd, n - 1) * std::pow(alpha, 1 - n) /
         (1.0 - alpha);
}

double sublevel_bound(const PolyStats& s, double r, double alpha) {
  if (!(r > 0.0)) throw precondition_error("sublevel bound needs r > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw precondition_error("alpha must be in (0,1)");
  if (s.kappa == 1) {
    // S(P,r) is empty when r < Linf: a univariate monomial in each variable
    return r < s.linf ? 0.0 : 1.0;
  }
  double v = c1_constant(s.n, s.k) * std::pow(alpha, 1 - s.n) *
             std::pow(r / s.linf, (1.0 - alpha) / static_cast<double>(s.kappa - 1));
  return std::min(v, 1.0);
}

double regularization_bound(const PolyStats& s, double eps, double alpha) {
  if (!(eps > 0.0)) throw precondition_error("regularization bound needs eps > 0");
  if (std::fabs(s.linf - 1.0) > 1e-9)
    throw precondition_error("regularization bound expects Linf(P) = 1 (normalize first)");
  return c2_constant(s.n, s.k, alpha) *
         std::pow(eps, (1.0 - alpha) / (2.0 * static_cast<double>(s.k - 1)));
}

double annulus_log_bound(const PolyStats& s, double eps) {
  if (!(eps > 0.0)) throw precondition_error("annulus bound needs eps > 0");
  return std::fabs(std::log(eps)) + 2.0 * std::fabs(std::log(s.l1)) + 3.0;
}

double holomorphic_transfer_bound(int d, double delta, double rho, double max_f) {
  if (d < 0) throw precondition_error("kernel dimension must be >= 0");
  if (!(delta > 0.0)) throw precondition_error("delta must be positive");
  if (rho < 2.0 * d / (3.0 * delta))
    throw precondition_error("holomorphic transfer bound needs rho >= 2d/(3 delta)");
  return (d + 1.0) * std::pow(3.0, d) * max_f * std::exp(-delta * rho);
}

BoundReport main_error_bound(const PolyStats& s, double rho) {
  if (s.k < 2 || s.n < 2) throw precondition_error("main error bound needs k >= 2 and n >= 2");
  if (!(rho > 1.0)) throw precondition_error("rho must exceed 1");
  BoundReport rep;
  rep.rho0 = rho0_constant(s);
  rep.applicable = rho >= rep.rho0;
  const double diam = static_cast<double>(s.diam);
  const double k = static_cast<double>(s.k);
  const double logrho = std::log(rho);
  rep.bound_value = 8.0 * std::pow(36.0 * kE * k, s.n - 1) * std::pow(logrho, s.n) *
                    std::pow(diam / rho, 1.0 / (k - 1.0));
  const double alpha = s.n * (k - 1.0) / logrho;
  const double eps_internal =
      std::pow((1.0 - alpha) * diam * s.l1 / (k - 1.0) * logrho / rho, 2.0);
  rep.components = {{"alpha", alpha}, {"epsilon", eps_internal}, {"log_rho", logrho}};
  return rep;
}

double exponential_bound(const LaurentPoly& p, double delta, double rho, int d) {
  if (p.is_zero()) throw precondition_error("exponential bound of the zero polynomial");
  if (!(delta > 0.0)) throw precondition_error("delta must be positive");
  if (rho < 2.0 * d / (3.0 * delta))
    throw precondition_error("exponential bound needs rho >= 2d/(3 delta)");
  const int n = p.vars();
  const LaurentPoly q = p * p.conj_reciprocal();
  const PolyStats qs = stats(q);

  // Sample |P P*| over radial shells ||h||_1 = delta of the annulus plus the
  // torus itself. Non-rigorous estimate of max|f| and of min|P| > 0.
  const std::uint64_t seed = 0x6d61686c65726231ULL;
  const long long nsamples = 32768;
  double max_log = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  std::vector<Complex> z(static_cast<std::size_t>(n));
  std::uint64_t ctr = 0;
  for (long long s = 0; s < nsamples; ++s) {
    // random point with ||h||_1 = t delta: exponential gaps normalized, then
    // scaled by t = 0 (torus), t = 1 (boundary shell) or t uniform (interior)
    std::vector<double> h(static_cast<std::size_t>(n), 0.0);
    if (s % 4 != 0) {
      double t = (s % 4 == 1) ? 1.0 : uniform01(seed, ctr++);
      double tot = 0.0;
      for (int i = 0; i < n; ++i) {
        double g = -std::log(std::max(uniform01(seed, ctr++), 1e-300));
        h[static_cast<std::size_t>(i)] = g;
        tot += g;
      }
      for (int i = 0; i < n; ++i) {
        double sign = uniform01(seed, ctr++) < 0.5 ? -1.0 : 1.0;
        h[static_cast<std::size_t>(i)] *= sign * t * delta / tot;
      }
    }
    for (int i = 0; i < n; ++i) {
      double th = 2.0 * kPi * uniform01(seed, ctr++);
      z[static_cast<std::size_t>(i)] =
          std::exp(h[static_cast<std::size_t>(i)]) * Complex(std::cos(th), std::sin(th));
    }
    double a = std::abs(q.eval(z));
    min_abs = std::min(min_abs, a);
    if (a > 0.0) max_log = std::max(max_log, std::fabs(std::log(a)));
  }
  if (min_abs < 1e-6 * std::max(1.0, qs.l1))
    throw numeric_error("delta too large: |P| nearly vanishes on the sampled annulus");
  const double max_f = max_log / 2.0 + kPi / 2.0;
  const double c = (n + 1.0) * std::pow(3.0, n) * 1.5 * max_f;  // 1.5: declared inflation
  return c * std::exp(-delta * rho);
}

}  // namespace mm
