#include "mm/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "mm/errors.hpp"
#include "json.hpp"

namespace mm {

LaurentPoly::LaurentPoly(int vars) : n_(vars) {
  if (vars < 0) throw precondition_error("variable count must be nonnegative");
}

LaurentPoly LaurentPoly::constant(int vars, Complex c) {
  LaurentPoly p(vars);
  p.add_term(Exponents(static_cast<std::size_t>(vars), 0), c);
  return p;
}

LaurentPoly LaurentPoly::monomial(int vars, const Exponents& e, Complex c) {
  LaurentPoly p(vars);
  p.add_term(e, c);
  return p;
}

void LaurentPoly::add_term(const Exponents& e, Complex c) {
  if (static_cast<int>(e.size()) != n_)
    throw precondition_error("exponent vector length does not match variable count");
  if (c == Complex(0.0, 0.0)) {
    return;
  }
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second == Complex(0.0, 0.0)) terms_.erase(it);
}

Complex LaurentPoly::coeff(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& rhs) const {
  if (n_ != rhs.n_) throw precondition_error("variable count mismatch in +");
  LaurentPoly out = *this;
  for (const auto& [e, c] : rhs.terms_) out.add_term(e, c);
  return out;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& rhs) const {
  if (n_ != rhs.n_) throw precondition_error("variable count mismatch in -");
  LaurentPoly out = *this;
  for (const auto& [e, c] : rhs.terms_) out.add_term(e, -c);
  return out;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& rhs) const {
  if (n_ != rhs.n_) throw precondition_error("variable count mismatch in *");
  LaurentPoly out(n_);
  Exponents e(static_cast<std::size_t>(n_));
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : rhs.terms_) {
      for (int i = 0; i < n_; ++i) e[static_cast<std::size_t>(i)] = ea[static_cast<std::size_t>(i)] + eb[static_cast<std::size_t>(i)];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

LaurentPoly LaurentPoly::scaled(Complex c) const {
  LaurentPoly out(n_);
  if (c == Complex(0.0, 0.0)) return out;
  for (const auto& [e, v] : terms_) out.add_term(e, v * c);
  return out;
}

namespace {

Complex powi(Complex z, long long e) {
  if (e < 0) return 1.0 / powi(z, -e);
  Complex acc(1.0, 0.0);
  Complex base = z;
  unsigned long long u = static_cast<unsigned long long>(e);
  while (u) {
    if (u & 1ULL) acc *= base;
    base *= base;
    u >>= 1;
  }
  return acc;
}

}  // namespace

Complex LaurentPoly::eval(std::span<const Complex> point) const {
  if (static_cast<int>(point.size()) != n_)
    throw precondition_error("evaluation point has wrong dimension");
  std::vector<std::map<long long, Complex>> cache(static_cast<std::size_t>(n_));
  Complex acc(0.0, 0.0);
  for (const auto& [e, c] : terms_) {
    Complex t = c;
    for (int i = 0; i < n_; ++i) {
      long long ei = e[static_cast<std::size_t>(i)];
      if (ei == 0) continue;
      Complex z = point[static_cast<std::size_t>(i)];
      if (z == Complex(0.0, 0.0) && ei < 0)
        throw precondition_error("zero coordinate with negative exponent");
      auto& cv = cache[static_cast<std::size_t>(i)];
      auto it = cv.find(ei);
      if (it == cv.end()) it = cv.emplace(ei, powi(z, ei)).first;
      t *= it->second;
    }
    acc += t;
  }
  return acc;
}

LaurentPoly LaurentPoly::conj_reciprocal() const {
  LaurentPoly out(n_);
  Exponents e(static_cast<std::size_t>(n_));
  for (const auto& [v, c] : terms_) {
    for (int i = 0; i < n_; ++i) e[static_cast<std::size_t>(i)] = -v[static_cast<std::size_t>(i)];
    out.add_term(e, std::conj(c));
  }
  return out;
}

PolyStats stats(const LaurentPoly& p) {
  if (p.is_zero()) throw precondition_error("stats of the zero polynomial");
  const int n = p.vars();
  PolyStats s;
  s.n = n;
  s.k = static_cast<long long>(p.term_count());
  s.k_i.assign(static_cast<std::size_t>(n), 0);
  std::vector<std::set<long long>> seen(static_cast<std::size_t>(n));
  std::vector<long long> lo(static_cast<std::size_t>(n), std::numeric_limits<long long>::max());
  std::vector<long long> hi(static_cast<std::size_t>(n), std::numeric_limits<long long>::min());
  for (const auto& [e, c] : p.terms()) {
    for (int i = 0; i < n; ++i) {
      long long ei = e[static_cast<std::size_t>(i)];
      seen[static_cast<std::size_t>(i)].insert(ei);
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], ei);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], ei);
    }
    double a = std::abs(c);
    s.l1 += a;
    s.linf = std::max(s.linf, a);
  }
  for (int i = 0; i < n; ++i) {
    // Grouping supp(P) by the i-th exponent cannot cancel (distinct fibers
    // never merge), so k_i is the number of distinct values of v_i.
    s.k_i[static_cast<std::size_t>(i)] = static_cast<long long>(seen[static_cast<std::size_t>(i)].size());
    s.kappa = std::max(s.kappa, s.k_i[static_cast<std::size_t>(i)]);
    s.diam = std::max(s.diam, hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// expression parser

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, int vars) : s_(text), n_(vars) {}

  LaurentPoly parse() {
    LaurentPoly p = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  std::string_view s_;
  int n_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool starts_factor(char c) const {
    return c == 'z' || c == '(' || c == '.' || std::isdigit(static_cast<unsigned char>(c));
  }

  LaurentPoly parse_expr() {
    LaurentPoly acc(n_);
    bool first = true;
    while (true) {
      char c = peek();
      double sign = 1.0;
      if (c == '+' || c == '-') {
        sign = (c == '-') ? -1.0 : 1.0;
        ++pos_;
      } else if (!first) {
        break;
      }
      LaurentPoly t = parse_term();
      acc = (sign < 0) ? acc - t : acc + t;
      first = false;
      c = peek();
      if (c != '+' && c != '-') break;
    }
    return acc;
  }

  LaurentPoly parse_term() {
    LaurentPoly acc = parse_factor();
    while (true) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        acc = acc * parse_factor();
      } else if (starts_factor(c)) {
        acc = acc * parse_factor();  // juxtaposition, e.g. "z1z2" or "2z1"
      } else {
        break;
      }
    }
    return acc;
  }

  LaurentPoly parse_factor() {
    char c = peek();
    if (c == 'z') return parse_variable();
    if (c == '(') {
      // '(' opens either a complex literal "(re,im)" or a subexpression.
      std::size_t save = pos_;
      Complex lit;
      if (try_complex_literal(&lit)) return LaurentPoly::constant(n_, lit);
      pos_ = save;
      ++pos_;  // consume '('
      LaurentPoly inner = parse_expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      return LaurentPoly::constant(n_, Complex(parse_number(), 0.0));
    }
    fail("expected a factor");
  }

  LaurentPoly parse_variable() {
    skip_ws();
    ++pos_;  // 'z'
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail("expected variable index after 'z'");
    long long idx = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      idx = idx * 10 + (s_[pos_] - '0');
      if (idx > 1'000'000) fail("variable index too large");
      ++pos_;
    }
    if (idx < 1 || idx > n_) fail("variable index out of range");
    long long e = 1;
    if (peek() == '^') {
      ++pos_;
      e = parse_signed_int();
    }
    Exponents ev(static_cast<std::size_t>(n_), 0);
    ev[static_cast<std::size_t>(idx - 1)] = e;
    return LaurentPoly::monomial(n_, ev, Complex(1.0, 0.0));
  }

  long long parse_signed_int() {
    skip_ws();
    long long sign = 1;
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      if (s_[pos_] == '-') sign = -1;
      ++pos_;
    }
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail("expected integer exponent");
    long long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > (1LL << 40)) fail("exponent too large");
      ++pos_;
    }
    return sign * v;
  }

  double parse_number(bool allow_sign = false) {
    skip_ws();
    std::size_t start = pos_;
    if (allow_sign && pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
    bool digits = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, digits = true;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, digits = true;
    }
    if (!digits) fail("expected a number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // bare 'e' is not an exponent
      }
    }
    return std::stod(std::string(s_.substr(start, pos_ - start)));
  }

  bool try_complex_literal(Complex* out) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '(') return false;
    std::size_t save = pos_;
    ++pos_;
    try {
      double re = parse_number(true);
      if (peek() != ',') {
        pos_ = save;
        return false;
      }
      ++pos_;
      double im = parse_number(true);
      if (peek() != ')') {
        pos_ = save;
        return false;
      }
      ++pos_;
      *out = Complex(re, im);
      return true;
    } catch (const parse_error&) {
      pos_ = save;
      return false;
    }
  }
};

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_coeff(Complex c) {
  if (c.imag() == 0.0) return format_double(c.real());
  return "(" + format_double(c.real()) + "," + format_double(c.imag()) + ")";
}

}  // namespace

LaurentPoly parse_poly(std::string_view text, int vars) {
  return PolyParser(text, vars).parse();
}

std::string LaurentPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  // Descending lex order prints "z1 + z2 + 1" rather than the reverse.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Complex cc = c;
    if (out.empty()) {
      if (cc.imag() == 0.0 && cc.real() < 0) {
        out += "-";
        cc = -cc;
      }
    } else {
      if (cc.imag() == 0.0 && cc.real() < 0) {
        out += " - ";
        cc = -cc;
      } else {
        out += " + ";
      }
    }
    std::string monom;
    for (int i = 0; i < n_; ++i) {
      long long ei = e[static_cast<std::size_t>(i)];
      if (ei == 0) continue;
      if (!monom.empty()) monom += "*";
      monom += "z" + std::to_string(i + 1);
      if (ei != 1) monom += "^" + std::to_string(ei);
    }
    if (monom.empty()) {
      out += format_coeff(cc);
    } else if (cc == Complex(1.0, 0.0)) {
      out += monom;
    } else {
      out += format_coeff(cc) + "*" + monom;
    }
  }
  return out;
}

std::string poly_to_json(const LaurentPoly& p) {
  nlohmann::json j;
  j["n"] = p.vars();
  j["terms"] = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) {
    nlohmann::json t;
    t["e"] = e;
    t["c"] = {c.real(), c.imag()};
    j["terms"].push_back(std::move(t));
  }
  return j.dump();
}

LaurentPoly poly_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("invalid json: ") + e.what(), 0);
  }
  if (!j.contains("n") || !j.contains("terms"))
    throw parse_error("json polynomial needs fields 'n' and 'terms'", 0);
  int n = j["n"].get<int>();
  LaurentPoly p(n);
  for (const auto& t : j["terms"]) {
    Exponents e = t.at("e").get<Exponents>();
    if (static_cast<int>(e.size()) != n) throw parse_error("term exponent length != n", 0);
    auto c = t.at("c");
    p.add_term(e, Complex(c.at(0).get<double>(), c.at(1).get<double>()));
  }
  return p;
}

}  // namespace mm
