#include "mm/dilog.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "mm/errors.hpp"

namespace mm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxBernoulli = 44;

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

struct Rat {
  i128 n = 0;
  i128 d = 1;

  void reduce() {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
  }
};

Rat rat_add(Rat a, Rat b) {
  i128 g = gcd128(a.d, b.d);
  i128 bd = b.d / g;
  Rat r{a.n * bd + b.n * (a.d / g), a.d * bd};
  r.reduce();
  return r;
}

Rat rat_mul_int(Rat a, i128 m) {
  Rat r{a.n * m, a.d};
  r.reduce();
  return r;
}

double rat_to_double(const Rat& r) {
  return static_cast<double>(r.n) / static_cast<double>(r.d);
}

// B_0 .. B_44 by the recurrence sum_{j=0}^{m} C(m+1,j) B_j = 0 (B_1 = -1/2).
const std::vector<Rat>& bernoulli_table() {
  static const std::vector<Rat> table = [] {
    std::vector<Rat> b(kMaxBernoulli + 1);
    b[0] = Rat{1, 1};
    for (int m = 1; m <= kMaxBernoulli; ++m) {
      Rat acc{0, 1};
      i128 binom = 1;  // C(m+1, 0)
      for (int j = 0; j < m; ++j) {
        acc = rat_add(acc, rat_mul_int(b[static_cast<std::size_t>(j)], binom));
        binom = binom * (m + 1 - j) / (j + 1);  // C(m+1, j+1)
      }
      // binom now equals C(m+1, m) = m+1
      Rat r{-acc.n, acc.d * binom};
      r.reduce();
      b[static_cast<std::size_t>(m)] = r;
    }
    // spot anchors: B_2 = 1/6, B_12 = -691/2730
    if (!(b[2].n == 1 && b[2].d == 6 && b[12].n == -691 && b[12].d == 2730))
      throw numeric_error("bernoulli table self-check failed");
    return b;
  }();
  return table;
}

}  // namespace

double bernoulli(int m) {
  if (m < 0 || m > kMaxBernoulli) throw precondition_error("bernoulli index out of range");
  return rat_to_double(bernoulli_table()[static_cast<std::size_t>(m)]);
}

Rational64 bernoulli_exact(int m) {
  if (m < 0 || m > 34) throw precondition_error("bernoulli_exact supports m <= 34");
  const Rat& r = bernoulli_table()[static_cast<std::size_t>(m)];
  return Rational64{static_cast<long long>(r.n), static_cast<long long>(r.d)};
}

bool bernoulli_recurrence_exact(int max_m) {
  if (max_m > kMaxBernoulli) return false;
  const auto& b = bernoulli_table();
  for (int m = 1; m <= max_m; ++m) {
    Rat acc{0, 1};
    i128 binom = 1;
    for (int j = 0; j <= m; ++j) {
      acc = rat_add(acc, rat_mul_int(b[static_cast<std::size_t>(j)], binom));
      binom = binom * (m + 1 - j) / (j + 1);
    }
    if (acc.n != 0) return false;
  }
  return true;
}

double zeta_even(int j) {
  if (j < 0 || j > 40) throw precondition_error("zeta_even index out of range");
  static const std::array<double, 41> table = [] {
    std::array<double, 41> t{};
    t[0] = -0.5;
    t[1] = kPi * kPi / 6.0;
    for (int jj = 2; jj <= 40; ++jj) {
      // direct summation; the tail beyond 200000 is below 1e-16 for s >= 4
      const double s = 2.0 * jj;
      double acc = 0.0;
      for (int k = 200000; k >= 1; --k) acc += std::pow(static_cast<double>(k), -s);
      t[static_cast<std::size_t>(jj)] = acc;
    }
    return t;
  }();
  return table[static_cast<std::size_t>(j)];
}

namespace {

// coefficients of Cl_2(t) = t - t log t + sum_{n>=1} c_n t^{2n+1} on [0, pi]
const std::vector<double>& clausen_coeffs() {
  static const std::vector<double> coeffs = [] {
    std::vector<double> c(37, 0.0);
    const double inv_2pi_sq = 1.0 / (4.0 * kPi * kPi);
    double scale = 1.0;  // (2 pi)^{-2n}
    for (int n = 1; n <= 36; ++n) {
      scale *= inv_2pi_sq;
      c[static_cast<std::size_t>(n)] =
          zeta_even(n) * scale / (static_cast<double>(n) * (2.0 * n + 1.0));
    }
    return c;
  }();
  return coeffs;
}

// B_n / (n+1)!, the Bernoulli series coefficients for Li_2 in u = -log(1-z)
const std::vector<double>& li2_u_coeffs() {
  static const std::vector<double> coeffs = [] {
    std::vector<double> v(kMaxBernoulli + 1);
    double fact = 1.0;  // (n+1)!
    for (int n = 0; n <= kMaxBernoulli; ++n) {
      fact *= (n + 1);
      v[static_cast<std::size_t>(n)] = bernoulli(n) / fact;
    }
    return v;
  }();
  return coeffs;
}

// power series, |z| <= 0.5
Complex li2_series(Complex z) {
  Complex acc(0.0, 0.0);
  Complex pw(1.0, 0.0);
  for (int k = 1; k <= 80; ++k) {
    pw *= z;
    Complex term = pw / static_cast<double>(k * k);
    acc += term;
    if (std::abs(term) < 1e-19 * (1.0 + std::abs(acc))) break;
  }
  return acc;
}

// Bernoulli series in u = -log(1-z); used after reduction to |z| <= 1,
// Re z <= 1/2 where |u| stays well inside the 2 pi radius.
Complex li2_log_series(Complex z) {
  const Complex u = -std::log(Complex(1.0, 0.0) - z);
  const auto& bf = li2_u_coeffs();
  Complex acc(0.0, 0.0);
  Complex pw(1.0, 0.0);
  for (int n = 0; n <= kMaxBernoulli; ++n) {
    pw *= u;
    double bn = bf[static_cast<std::size_t>(n)];
    if (bn == 0.0) continue;
    Complex term = bn * pw;
    acc += term;
    if (n > 2 && std::abs(term) < 1e-19 * (1.0 + std::abs(acc))) break;
  }
  return acc;
}

}  // namespace

double clausen2(double theta) {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  double sign = 1.0;
  if (t > kPi) {
    t = 2.0 * kPi - t;
    sign = -1.0;
  }
  if (t == 0.0) return 0.0;
  const auto& c = clausen_coeffs();
  double acc = t * (1.0 - std::log(t));
  const double t2 = t * t;
  double pw = t;
  for (int n = 1; n <= 36; ++n) {
    pw *= t2;
    double term = c[static_cast<std::size_t>(n)] * pw;
    acc += term;
    if (std::fabs(term) < 1e-18 * std::fabs(acc)) break;
  }
  return sign * acc;
}

Complex li2(Complex z) {
  const double pi2_6 = kPi * kPi / 6.0;
  if (z == Complex(0.0, 0.0)) return {0.0, 0.0};
  if (z == Complex(1.0, 0.0)) return {pi2_6, 0.0};
  const double r = std::abs(z);
  if (r <= 0.5) return li2_series(z);
  if (r > 1.0) {
    // Li_2(z) + Li_2(1/z) = -pi^2/6 - log(-z)^2 / 2
    Complex lz = std::log(-z);
    return -li2(1.0 / z) - pi2_6 - 0.5 * lz * lz;
  }
  if (z.real() > 0.5) {
    // Li_2(z) + Li_2(1-z) = pi^2/6 - log(z) log(1-z)
    Complex w = Complex(1.0, 0.0) - z;
    return pi2_6 - std::log(z) * std::log(w) - li2(w);
  }
  return li2_log_series(z);
}

double bloch_wigner(Complex z) {
  if (z == Complex(0.0, 0.0) || z == Complex(1.0, 0.0)) return 0.0;
  if (z.imag() == 0.0) return 0.0;  // D vanishes on the real axis
  const double r = std::abs(z);
  if (std::fabs(r - 1.0) <= 1e-12) return clausen2(std::arg(z));
  return li2(z).imag() + std::arg(Complex(1.0, 0.0) - z) * std::log(r);
}

double zeta3() { return 1.20205690315959428539973816151; }

double glaisher() { return 1.28242712910062263687534256887; }

double zetap_minus1() { return 1.0 / 12.0 - std::log(glaisher()); }

double zetap_minus2() { return -zeta3() / (4.0 * kPi * kPi); }

}  // namespace mm
