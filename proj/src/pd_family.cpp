#include "mm/pd_family.hpp"

#include <cmath>
#include <numbers>

#include "mm/dilog.hpp"
#include "mm/errors.hpp"
#include "mm/measure.hpp"

namespace mm {

namespace {
constexpr double kPi = std::numbers::pi;

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    c += (std::fabs(s) >= std::fabs(x)) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double get() const { return s + c; }
};
}  // namespace

LaurentPoly pd_polynomial(int d) {
  if (d < 0) throw precondition_error("pd_polynomial needs d >= 0");
  LaurentPoly p(2);
  for (long long i = 0; i <= d; ++i)
    for (long long j = 0; i + j <= d; ++j) p.add_term({i, j}, Complex(1.0, 0.0));
  return p;
}

LaurentPoly p_infinity_polynomial() {
  // (1-z1)(1-z2) - (1-z3)(1-z4) expanded: the constants cancel
  LaurentPoly p(4);
  p.add_term({1, 0, 0, 0}, -1.0);
  p.add_term({0, 1, 0, 0}, -1.0);
  p.add_term({1, 1, 0, 0}, 1.0);
  p.add_term({0, 0, 1, 0}, 1.0);
  p.add_term({0, 0, 0, 1}, 1.0);
  p.add_term({0, 0, 1, 1}, -1.0);
  return p;
}

SubstMatrix md_matrix(int d) {
  if (d < 0) throw precondition_error("md_matrix needs d >= 0");
  const long long t = d + 2;
  return make_subst_matrix(2, 4, {t, 0, 1, 0, 0, 1, 0, t});
}

double mpd_exact(int d) {
  if (d < 1) throw precondition_error("mpd_exact needs d >= 1");
  // m(P_d) = 3/(d+1) sum_{k=1}^{d+1} (d+2-2k)/(2 pi) Cl2(2 pi k/(d+2))
  //        - 3/(d+2) sum_{k=1}^{d}   (d+1-2k)/(2 pi) Cl2(2 pi k/(d+1))
  KahanSum s1, s2;
  for (long long k = 1; k <= d + 1; ++k) {
    double w = static_cast<double>(d + 2 - 2 * k) / (2.0 * kPi);
    s1.add(w * clausen2(2.0 * kPi * static_cast<double>(k) / static_cast<double>(d + 2)));
  }
  for (long long k = 1; k <= d; ++k) {
    double w = static_cast<double>(d + 1 - 2 * k) / (2.0 * kPi);
    s2.add(w * clausen2(2.0 * kPi * static_cast<double>(k) / static_cast<double>(d + 1)));
  }
  return 3.0 * s1.get() / static_cast<double>(d + 1) - 3.0 * s2.get() / static_cast<double>(d + 2);
}

double m_p_infinity() { return 9.0 * zeta3() / (2.0 * kPi * kPi); }

ExpansionCoeffs expansion_coeffs(int K) {
  if (K < 0 || K > 40)
    throw precondition_error("expansion order must be in [0, 40] (Bernoulli growth limit)");
  ExpansionCoeffs ec;
  ec.K = K;
  ec.zeta3 = zeta3();
  ec.zetap_minus1 = zetap_minus1();
  ec.zetap_minus2 = zetap_minus2();
  ec.log_2pi = std::log(2.0 * kPi);
  for (int m = 0; m <= 2 * K + 2 && m <= 44; ++m) ec.bernoulli.push_back(bernoulli(m));

  ec.alpha.resize(static_cast<std::size_t>(K) + 1);
  ec.alpha[0] = 6.0 * (ec.zetap_minus1 - ec.zetap_minus2) + ec.log_2pi / 2.0 - 1.0;
  for (int k = 1; k <= K; ++k) {
    // alpha_k = 12 (-1)^k / (k(k+1)) * sum_{j=0}^{floor(k/2)}
    //   C(k+1,2j) (2^{k+1-2j}-1)(2j-1) / ((2j+1)(2j+2)) B_{2j+2} zeta(2j)
    double sum = 0.0;
    for (int j = 0; 2 * j <= k; ++j) {
      double binom = 1.0;  // C(k+1, 2j), exact in double for k <= 41
      for (int t = 1; t <= 2 * j; ++t)
        binom = binom * static_cast<double>(k + 2 - t) / static_cast<double>(t);
      double pow2 = std::ldexp(1.0, k + 1 - 2 * j) - 1.0;
      double term = binom * pow2 * static_cast<double>(2 * j - 1) /
                    (static_cast<double>(2 * j + 1) * static_cast<double>(2 * j + 2)) *
                    bernoulli(2 * j + 2) * zeta_even(j);
      sum += term;
    }
    double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    ec.alpha[static_cast<std::size_t>(k)] =
        12.0 * sgn / (static_cast<double>(k) * static_cast<double>(k + 1)) * sum;
  }
  return ec;
}

double mpd_asymptotic(int d, int K) {
  if (d < 2) throw precondition_error("mpd_asymptotic needs d >= 2");
  ExpansionCoeffs ec = expansion_coeffs(K);
  double dd = static_cast<double>(d);
  double series = -std::log(dd) / 2.0;
  double pw = 1.0;
  for (int k = 0; k <= K; ++k) {
    series += ec.alpha[static_cast<std::size_t>(k)] / pw;
    pw *= dd;
  }
  return m_p_infinity() + series / (static_cast<double>(d + 1) * static_cast<double>(d + 2));
}

bool substitution_identity_check(int d, int grid) {
  if (d < 1) throw precondition_error("substitution_identity_check needs d >= 1");

  // exact sparse identity: P_d (1-z1)(1-z2)(z1-z2) == (1-z1^{d+2})(1-z2) - (1-z1)(1-z2^{d+2})
  const long long t = d + 2;
  LaurentPoly one = LaurentPoly::constant(2, 1.0);
  LaurentPoly z1 = LaurentPoly::monomial(2, {1, 0}, 1.0);
  LaurentPoly z2 = LaurentPoly::monomial(2, {0, 1}, 1.0);
  LaurentPoly z1t = LaurentPoly::monomial(2, {t, 0}, 1.0);
  LaurentPoly z2t = LaurentPoly::monomial(2, {0, t}, 1.0);
  LaurentPoly lhs = pd_polynomial(d) * (one - z1) * (one - z2) * (z1 - z2);
  LaurentPoly rhs = (one - z1t) * (one - z2) - (one - z1) * (one - z2t);
  if (lhs.terms() != rhs.terms()) return false;

  // and the measures agree: quadrature on (P_inf)_{M_d} vs the closed formula
  LaurentPoly pa = substitute(p_infinity_polynomial(), md_matrix(d));
  MeasureResult mq = measure_iterated(pa, grid);
  double tol = std::max(2e-4, 10.0 * mq.error_estimate);
  return std::fabs(mq.value - mpd_exact(d)) <= tol;
}

}  // namespace mm
