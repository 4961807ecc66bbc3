#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mm {

using Complex = std::complex<double>;

// Exponent vector of a monomial z1^{v1}...zn^{vn}; length equals the variable
// count of the owning polynomial. Ordered lexicographically by std::vector.
using Exponents = std::vector<long long>;

// Sparse Laurent polynomial with complex double coefficients. Canonical form:
// no stored coefficient is exactly zero, all exponent vectors have length n.
// The zero polynomial is the empty term map. Immutable in spirit: arithmetic
// returns new values, so instances can be shared read-only across threads.
class LaurentPoly {
 public:
  explicit LaurentPoly(int vars);

  static LaurentPoly constant(int vars, Complex c);
  static LaurentPoly monomial(int vars, const Exponents& e, Complex c);

  int vars() const { return n_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Exponents, Complex>& terms() const { return terms_; }

  // Merges `c` into the coefficient at `e`, dropping the term if the sum is
  // exactly zero.
  void add_term(const Exponents& e, Complex c);
  Complex coeff(const Exponents& e) const;

  LaurentPoly operator+(const LaurentPoly& rhs) const;
  LaurentPoly operator-(const LaurentPoly& rhs) const;
  LaurentPoly operator*(const LaurentPoly& rhs) const;
  LaurentPoly scaled(Complex c) const;

  // Term-by-term evaluation with per-variable power caching. Throws
  // precondition_error for a zero coordinate raised to a negative exponent.
  Complex eval(std::span<const Complex> point) const;

  // P*(z) = sum conj(c_v) z^{-v}; on the unit torus P * P* = |P|^2.
  LaurentPoly conj_reciprocal() const;

  std::string to_string() const;

 private:
  int n_;
  std::map<Exponents, Complex> terms_;
};

// Scalar statistics of a nonzero Laurent polynomial: term count k, the k_i
// counts (P read as a univariate polynomial in z_i), their maximum kappa,
// the support diameter, and the coefficient length/modulus norms.
struct PolyStats {
  int n = 0;
  long long k = 0;
  std::vector<long long> k_i;
  long long kappa = 0;
  long long diam = 0;
  double l1 = 0.0;
  double linf = 0.0;
};

PolyStats stats(const LaurentPoly& p);

// Parses the expression grammar: terms joined by +/-, factors are z<idx>
// with optional ^<signed int>, coefficients decimal or (re,im), parenthesized
// subexpressions multiplied out at parse time. Throws parse_error.
LaurentPoly parse_poly(std::string_view text, int vars);

// Sparse interchange format: {"n": ..., "terms": [{"e": [...], "c": [re,im]}]}.
std::string poly_to_json(const LaurentPoly& p);
LaurentPoly poly_from_json(std::string_view json_text);

}  // namespace mm
