#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mm/bounds.hpp"
#include "mm/errors.hpp"
#include "mm/laurent.hpp"
#include "mm/lattice.hpp"
#include "mm/measure.hpp"
#include "mm/pd_family.hpp"

using namespace mm;

namespace {
PolyStats stats_of(const char* text, int n) { return stats(parse_poly(text, n)); }
}  // namespace

TEST_CASE("rho0: evaluation and the monomial guard") {
  CHECK(rho0_constant(stats_of("z1+z2+1", 2)) == doctest::Approx(std::exp(20.0)).epsilon(1e-12));
  // k=2: exp(2 (k-1) max(n,5)) = e^10 regardless of n <= 5
  CHECK(rho0_constant(stats_of("z1+z2", 2)) == doctest::Approx(std::exp(10.0)).epsilon(1e-12));
  // k=2, n=5, diam=10: max(11, 700, e^10) = e^10
  CHECK(rho0_constant(stats_of("z1^10 + z5", 5)) == doctest::Approx(std::exp(10.0)).epsilon(1e-12));
  CHECK_THROWS_AS(rho0_constant(stats_of("3*z1^2", 1)), precondition_error);
}

TEST_CASE("delta_eps: branch selection and the diam 0 sentinel") {
  auto s = stats_of("z1+z2+1", 2);
  double l43 = std::log(4.0 / 3.0);
  CHECK(delta_eps(s, 9.0 * l43 * l43) == doctest::Approx(l43).epsilon(1e-14));
  CHECK(delta_eps(s, 1.0) == doctest::Approx(l43).epsilon(1e-14));
  // small eps activates the sqrt branch and scales like sqrt(eps)
  CHECK(delta_eps(s, 1e-8) == doctest::Approx(1e-4 / 3.0).epsilon(1e-12));
  CHECK(delta_eps(s, 4e-8) / delta_eps(s, 1e-8) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK(std::isinf(delta_eps(stats_of("z1", 1), 0.5)));
  CHECK_THROWS_AS(delta_eps(s, 0.0), precondition_error);
}

TEST_CASE("c1 and c2: values and monotonicity") {
  CHECK(c1_constant(1, 3) == doctest::Approx(18.0));
  CHECK(c1_constant(2, 3) == doctest::Approx(5832.0));
  CHECK(c1_constant(1, 2) == doctest::Approx(12.0));
  CHECK(c2_constant(1, 2, 0.5) == doctest::Approx(96.0));
  CHECK(c2_constant(2, 3, 0.5) == doctest::Approx(139968.0));
  CHECK(c2_constant(1, 2, 0.999) > 1e4);  // pole at alpha = 1

  for (int n = 1; n < 4; ++n) {
    for (long long k = 2; k < 8; ++k) {
      CHECK(c1_constant(n + 1, k) > c1_constant(n, k));
      CHECK(c1_constant(n, k + 1) > c1_constant(n, k));
      CHECK(c2_constant(n + 1, k, 0.3) > c2_constant(n, k, 0.3));
      CHECK(c2_constant(n, k + 1, 0.3) > c2_constant(n, k, 0.3));
    }
  }
  CHECK_THROWS_AS(c2_constant(2, 3, 1.0), precondition_error);
}

TEST_CASE("sublevel bound: clamping, kappa=1 edge, and Monte Carlo domination") {
  auto s1 = stats_of("z1-1", 1);
  // 12 * 0.1^{0.5} = 3.79 clamps to 1; alpha = 0.01 clamps too
  CHECK(sublevel_bound(s1, 0.1, 0.5) == doctest::Approx(1.0));
  CHECK(sublevel_bound(s1, 0.1, 0.01) == doctest::Approx(1.0));
  CHECK(sublevel_bound(s1, 2.0, 0.5) == doctest::Approx(1.0));  // r >= Linf
  // unclamped branch
  CHECK(sublevel_bound(s1, 0.01, 0.1) == doctest::Approx(12.0 * std::pow(0.01, 0.9)));

  auto mono = stats_of("2*z1^3*z2", 2);  // kappa = 1
  CHECK(sublevel_bound(mono, 0.5, 0.5) == 0.0);
  CHECK(sublevel_bound(mono, 2.5, 0.5) == 1.0);

  CHECK_THROWS_AS(sublevel_bound(s1, 0.1, 1.5), precondition_error);
}

TEST_CASE("sublevel bound dominates the Monte Carlo battery") {
  struct Entry {
    const char* text;
    int n;
  };
  const Entry battery[] = {
      {"z1-1", 1}, {"z1+z2+1", 2}, {"(z1-1)*(z2-1)", 2}, {"(z1-1)*(z1-1)", 1}};
  std::uint64_t seed = 400;
  for (const Entry& en : battery) {
    auto p = parse_poly(en.text, en.n);
    auto st = stats(p);
    for (double r : {0.01, 0.1, 0.5}) {
      auto est = sublevel_measure(p, r, 150000, seed++);
      for (double alpha : {0.1, 0.5}) CHECK(est.ci_high <= sublevel_bound(st, r, alpha));
    }
  }
}

TEST_CASE("sharpness family: measured sublevel volume tracks r within a band") {
  auto p = parse_poly("z1-1", 1);
  for (double r : {0.2, 0.1, 0.05, 0.02}) {
    auto est = sublevel_measure(p, r, 400000, 31);
    double ratio = est.value / r;  // closed form is asin(r/2)*(2/pi) ~ r/pi
    CHECK(ratio > 0.2);
    CHECK(ratio < 0.5);
  }
}

TEST_CASE("regularization bound: values and measured-gap domination") {
  auto s = stats_of("z1-1", 1);
  CHECK(regularization_bound(s, 1e-4, 0.5) == doctest::Approx(9.6));
  // eps^{(1-alpha)/(2(k-1))} = eps^{1/4} here, so the bound decays to 0
  CHECK(regularization_bound(s, 1e-12, 0.5) == doctest::Approx(0.096));
  CHECK(regularization_bound(s, 1e-16, 0.5) < regularization_bound(s, 1e-12, 0.5));

  auto p = parse_poly("z1+z2+1", 2);
  auto sp = stats(p);
  IntegrateOptions opt;
  opt.grid = 512;
  double mref = measure_iterated(p, 512).value;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    double gap = integrate(TorusIntegrand::regularized(p, eps), nullptr, opt) - mref;
    CHECK(gap >= -1e-10);
    CHECK(gap <= regularization_bound(sp, eps, 0.5));
  }
  CHECK_THROWS_AS(regularization_bound(stats_of("2*z1+1", 1), 1e-2, 0.5), precondition_error);
}

TEST_CASE("annulus log bound values") {
  CHECK(annulus_log_bound(stats_of("z1", 1), 1.0) == doctest::Approx(3.0));
  // eps = e^-2, L1 = e: 2 + 2 + 3 = 7 (synthetic stats)
  PolyStats s;
  s.l1 = std::numbers::e;
  CHECK(annulus_log_bound(s, std::exp(-2.0)) == doctest::Approx(7.0));
  CHECK(annulus_log_bound(stats_of("z1+z2+1", 2), 0.01) ==
        doctest::Approx(std::log(100.0) + 2.0 * std::log(3.0) + 3.0));
}

TEST_CASE("holomorphic transfer bound: value, d=0 edge, precondition boundary") {
  CHECK(holomorphic_transfer_bound(1, 1.0, 10.0, 1.0) == doctest::Approx(6.0 * std::exp(-10.0)));
  CHECK(holomorphic_transfer_bound(0, 0.5, 3.0, 2.0) == doctest::Approx(2.0 * std::exp(-1.5)));
  CHECK_NOTHROW(holomorphic_transfer_bound(3, 0.1, 20.0, 1.0));  // rho = 2d/(3 delta) exactly
  CHECK_THROWS_AS(holomorphic_transfer_bound(3, 0.1, 19.99, 1.0), precondition_error);
}

TEST_CASE("main error bound: value at rho0, applicability flag, monotonicity") {
  auto s = stats_of("z1+z2+1", 2);
  auto rep = main_error_bound(s, std::exp(20.0));
  CHECK(rep.applicable);
  // 8 * 108 e * 400 * e^{-10}
  CHECK(rep.bound_value == doctest::Approx(345600.0 * std::exp(-9.0)).epsilon(1e-10));
  CHECK(rep.bound_value == doctest::Approx(42.65).epsilon(1e-3));
  bool saw_alpha = false, saw_eps = false;
  for (const auto& [k, v] : rep.components) {
    if (k == "alpha") {
      saw_alpha = true;
      CHECK(v == doctest::Approx(2.0 * 2.0 / 20.0));
    }
    if (k == "epsilon") saw_eps = true;
  }
  CHECK(saw_alpha);
  CHECK(saw_eps);

  auto low = main_error_bound(s, 1000.0);
  CHECK_FALSE(low.applicable);
  CHECK(low.bound_value > 0.0);

  CHECK(main_error_bound(s, std::exp(21.0)).bound_value < rep.bound_value);
  CHECK_THROWS_AS(main_error_bound(stats_of("z1+1", 1), 100.0), precondition_error);
}

TEST_CASE("main error bound dominates the measured gap for the trinomial family") {
  // regression guard: at rho = d in {100, 1000} the formula value exceeds 1
  // while the measured gap is tiny
  auto s = stats_of("z1+z2+1", 2);
  double mref = mpd_exact(1);
  for (int d : {100, 1000}) {
    LaurentPoly q(1);
    q.add_term({0}, 1.0);
    q.add_term({1}, 1.0);
    q.add_term({d}, 1.0);
    double gap = std::fabs(measure_univariate_exact(q).value - mref);
    auto rep = main_error_bound(s, static_cast<double>(d));
    CHECK_FALSE(rep.applicable);  // rho far below e^20
    CHECK(gap <= rep.bound_value);
    CHECK(rep.bound_value > 1.0);
    CHECK(gap < 1e-3);
  }
}

TEST_CASE("exponential bound: constant family, decay domination, precondition") {
  // m(z1 z2 - 2) = log 2 for every row substitution; the gap is exactly 0
  auto p12 = parse_poly("z1*z2-2", 2);
  double m_ref = measure_iterated(p12, 256).value;
  auto a = make_subst_matrix(1, 2, {1, 50});
  double gap = std::fabs(measure_univariate_exact(substitute(p12, a)).value - m_ref);
  double bnd = exponential_bound(p12, 0.3, 50.0, 1);
  CHECK(gap <= bnd);

  // 3 + z1 + z2 has no torus zeros; measured gaps sit far below C e^{-0.2 d}
  auto p3 = parse_poly("3+z1+z2", 2);
  double m3 = measure_iterated(p3, 512).value;
  for (int d : {10, 20, 30, 40, 50, 60}) {
    LaurentPoly q(1);
    q.add_term({0}, 3.0);
    q.add_term({1}, 1.0);
    q.add_term({d}, 1.0);
    double g = std::fabs(measure_univariate_exact(q).value - m3);
    CHECK(g <= exponential_bound(p3, 0.2, static_cast<double>(d), 1));
  }

  CHECK_THROWS_AS(exponential_bound(p3, 0.01, 10.0, 1), precondition_error);  // rho delta < 2d/3
  // (z1-1)^2 vanishes on the torus itself, which the sampling detects
  CHECK_THROWS_AS(exponential_bound(parse_poly("(z1-1)*(z1-1)", 1), 0.3, 100.0, 1), numeric_error);
}
