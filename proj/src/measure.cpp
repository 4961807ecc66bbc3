#include "mm/measure.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "mm/errors.hpp"

namespace mm {

const char* measure_method_name(MeasureMethod m) {
  switch (m) {
    case MeasureMethod::univariate_exact: return "univariate-exact";
    case MeasureMethod::iterated_quadrature: return "iterated-quadrature";
    case MeasureMethod::monte_carlo: return "monte-carlo";
  }
  return "?";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Parlett-Reinsch balancing (radix 2), keeps Hessenberg structure.
void balance_inplace(Eigen::MatrixXcd& h) {
  const Eigen::Index n = h.rows();
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        r += std::abs(h(i, j));
        c += std::abs(h(j, i));
      }
      if (r == 0.0 || c == 0.0) continue;
      double f = 1.0;
      double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if ((c + r) < 0.95 * s && f != 1.0) {
        converged = false;
        h.row(i) *= 1.0 / f;
        h.col(i) *= f;
      }
    }
  }
}

std::vector<Complex> companion_roots(const std::vector<Complex>& a) {
  const std::size_t deg = a.size() - 1;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(deg),
                                              static_cast<Eigen::Index>(deg));
  const Complex lead = a.back();
  for (std::size_t j = 0; j < deg; ++j)
    h(0, static_cast<Eigen::Index>(j)) = -a[deg - 1 - j] / lead;
  for (std::size_t j = 1; j < deg; ++j)
    h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j - 1)) = 1.0;
  balance_inplace(h);
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur;
  schur.computeFromHessenberg(h, h, false);
  if (schur.info() != Eigen::Success) throw numeric_error("companion eigensolver failed");
  std::vector<Complex> roots(deg);
  for (std::size_t j = 0; j < deg; ++j)
    roots[j] = schur.matrixT()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
  return roots;
}

// log|lead| + sum log max(|root|,1) for a dense polynomial with nonzero ends.
// Roots with |alpha| within 1e-12 of 1 contribute 0.
double measure_from_coeffs(const std::vector<Complex>& a, long long* root_count) {
  const std::size_t deg = a.size() - 1;
  if (root_count) *root_count = static_cast<long long>(deg);
  double value = std::log(std::abs(a.back()));
  if (deg == 0) return value;
  if (deg == 1) {
    double m = std::abs(a[0] / a[1]);
    if (std::fabs(m - 1.0) > 1e-12 && m > 1.0) value += std::log(m);
    return value;
  }
  std::vector<Complex> roots;
  if (deg == 2) {
    // stable quadratic: q = -(b + sgn * disc)/2, roots q/a and c/q
    Complex b = a[1], a2 = a[2], c0 = a[0];
    Complex disc = std::sqrt(b * b - 4.0 * a2 * c0);
    if (std::real(std::conj(b) * disc) < 0.0) disc = -disc;
    Complex q = -0.5 * (b + disc);
    if (q == Complex(0.0, 0.0)) {
      roots = {Complex(0.0, 0.0), Complex(0.0, 0.0)};
    } else {
      roots = {q / a2, c0 / q};
    }
  } else {
    roots = companion_roots(a);
  }
  for (const Complex& z : roots) {
    double m = std::abs(z);
    if (std::fabs(m - 1.0) <= 1e-12) continue;
    if (m > 1.0) value += std::log(m);
  }
  return value;
}

struct CompiledTerm {
  Complex c;
  std::vector<double> v;  // exponents as doubles for angle dot products
};

std::vector<CompiledTerm> compile_terms(const LaurentPoly& p) {
  std::vector<CompiledTerm> out;
  out.reserve(p.term_count());
  for (const auto& [e, c] : p.terms()) {
    CompiledTerm t;
    t.c = c;
    t.v.assign(e.begin(), e.end());
    out.push_back(std::move(t));
  }
  return out;
}

// P(e^{i theta_1},...,e^{i theta_n}) via one sincos per term.
Complex eval_angles(const std::vector<CompiledTerm>& terms, const double* theta, int n) {
  Complex acc(0.0, 0.0);
  for (const auto& t : terms) {
    double phase = 0.0;
    for (int i = 0; i < n; ++i) phase += t.v[static_cast<std::size_t>(i)] * theta[i];
    acc += t.c * Complex(std::cos(phase), std::sin(phase));
  }
  return acc;
}

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    c += (std::fabs(s) >= std::fabs(x)) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double get() const { return s + c; }
};

struct IteratedRun {
  double value = 0.0;
  long long degenerate = 0;
  long long nodes = 0;
};

IteratedRun iterated_run(const LaurentPoly& p, int grid) {
  const int n = p.vars();
  const PolyStats st = stats(p);
  // innermost variable: the one with the most structure (max k_i), ties to
  // the lowest index
  int inner = 0;
  for (int i = 1; i < n; ++i)
    if (st.k_i[static_cast<std::size_t>(i)] > st.k_i[static_cast<std::size_t>(inner)]) inner = i;

  std::vector<int> outer;
  for (int i = 0; i < n; ++i)
    if (i != inner) outer.push_back(i);
  const int odim = n - 1;
  const long long big_n = grid;

  double total_nodes_d = std::pow(static_cast<double>(big_n), odim);
  if (total_nodes_d > static_cast<double>(1LL << 26))
    throw numeric_error("iterated quadrature grid too large");
  const long long total_nodes = static_cast<long long>(total_nodes_d + 0.5);

  // exact roots of unity so grid angles carry no accumulated drift
  std::vector<Complex> unit(static_cast<std::size_t>(big_n));
  for (long long r = 0; r < big_n; ++r)
    unit[static_cast<std::size_t>(r)] =
        Complex(std::cos(kTwoPi * static_cast<double>(r) / static_cast<double>(big_n)),
                std::sin(kTwoPi * static_cast<double>(r) / static_cast<double>(big_n)));

  struct FiberTerm {
    Complex c;
    long long vin;
    std::vector<long long> rv;  // outer exponents reduced mod N
  };
  long long vmin = 0, vmax = 0;
  bool first = true;
  std::vector<FiberTerm> fterms;
  for (const auto& [e, c] : p.terms()) {
    FiberTerm t;
    t.c = c;
    t.vin = e[static_cast<std::size_t>(inner)];
    t.rv.resize(static_cast<std::size_t>(odim));
    for (int s = 0; s < odim; ++s) {
      long long v = e[static_cast<std::size_t>(outer[static_cast<std::size_t>(s)])];
      t.rv[static_cast<std::size_t>(s)] = ((v % big_n) + big_n) % big_n;
    }
    if (first || t.vin < vmin) vmin = first ? t.vin : std::min(vmin, t.vin);
    if (first || t.vin > vmax) vmax = first ? t.vin : std::max(vmax, t.vin);
    first = false;
    fterms.push_back(std::move(t));
  }
  const std::size_t fsize = static_cast<std::size_t>(vmax - vmin + 1);

  const double degen_tol = 1e-13 * st.l1;
  KahanSum acc;
  long long degenerate = 0;
  std::vector<long long> idx(static_cast<std::size_t>(odim), 0);
  std::vector<Complex> fiber(fsize);
  std::vector<Complex> clean;
  clean.reserve(fsize);

  for (long long node = 0; node < total_nodes; ++node) {
    std::fill(fiber.begin(), fiber.end(), Complex(0.0, 0.0));
    for (const auto& t : fterms) {
      long long r = 0;
      for (int s = 0; s < odim; ++s)
        r += idx[static_cast<std::size_t>(s)] * t.rv[static_cast<std::size_t>(s)] % big_n;
      r %= big_n;
      fiber[static_cast<std::size_t>(t.vin - vmin)] += t.c * unit[static_cast<std::size_t>(r)];
    }
    double maxabs = 0.0;
    for (const auto& z : fiber) maxabs = std::max(maxabs, std::abs(z));
    if (maxabs <= degen_tol) {
      ++degenerate;
      if (degenerate * 100 > total_nodes)
        throw numeric_error(
            "more than 1% of quadrature fibers are degenerate; "
            "the polynomial has a factor in the outer variables only");
    } else {
      // strip top/bottom coefficients drowned by cancellation noise
      std::size_t lo = 0, hi = fsize - 1;
      const double trim = 1e-13 * maxabs;
      while (lo < hi && std::abs(fiber[lo]) <= trim) ++lo;
      while (hi > lo && std::abs(fiber[hi]) <= trim) --hi;
      clean.assign(fiber.begin() + static_cast<std::ptrdiff_t>(lo),
                   fiber.begin() + static_cast<std::ptrdiff_t>(hi + 1));
      acc.add(measure_from_coeffs(clean, nullptr));
    }
    for (int s = 0; s < odim; ++s) {
      if (++idx[static_cast<std::size_t>(s)] < big_n) break;
      idx[static_cast<std::size_t>(s)] = 0;
    }
  }

  IteratedRun run;
  run.degenerate = degenerate;
  run.nodes = total_nodes;
  // skipped nodes keep half their quadrature weight in the normalizer
  double denom = static_cast<double>(total_nodes - degenerate) + 0.5 * static_cast<double>(degenerate);
  run.value = denom > 0 ? acc.get() / denom : 0.0;
  return run;
}

}  // namespace

std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs) {
  while (!coeffs.empty() && coeffs.back() == Complex(0.0, 0.0)) coeffs.pop_back();
  if (coeffs.size() <= 1) throw precondition_error("need degree >= 1 for roots");
  std::size_t zero_roots = 0;
  while (coeffs[zero_roots] == Complex(0.0, 0.0)) ++zero_roots;
  std::vector<Complex> a(coeffs.begin() + static_cast<std::ptrdiff_t>(zero_roots), coeffs.end());
  std::vector<Complex> roots(zero_roots, Complex(0.0, 0.0));
  if (a.size() == 2) {
    roots.push_back(-a[0] / a[1]);
  } else if (a.size() > 2) {
    auto r = companion_roots(a);
    roots.insert(roots.end(), r.begin(), r.end());
  }
  return roots;
}

MeasureResult measure_univariate_exact(const LaurentPoly& p) {
  if (p.vars() != 1) throw precondition_error("measure_univariate_exact needs one variable");
  if (p.is_zero()) throw precondition_error("Mahler measure of the zero polynomial");
  const long long emin = p.terms().begin()->first[0];
  const long long emax = p.terms().rbegin()->first[0];
  const long long deg = emax - emin;
  if (deg > 500'000) throw numeric_error("polynomial degree too large for root finding");
  std::vector<Complex> a(static_cast<std::size_t>(deg + 1), Complex(0.0, 0.0));
  for (const auto& [e, c] : p.terms()) a[static_cast<std::size_t>(e[0] - emin)] = c;
  MeasureResult res;
  res.method = MeasureMethod::univariate_exact;
  res.value = measure_from_coeffs(a, &res.roots);
  res.error_estimate = std::max(2e-16, 4e-16 * static_cast<double>(deg));
  return res;
}

MeasureResult measure_iterated(const LaurentPoly& p, int grid_per_dim) {
  if (p.vars() < 2) throw precondition_error("measure_iterated needs n >= 2");
  if (p.is_zero()) throw precondition_error("Mahler measure of the zero polynomial");
  if (grid_per_dim < 2) throw precondition_error("grid_per_dim must be >= 2");
  IteratedRun run = iterated_run(p, grid_per_dim);
  MeasureResult res;
  res.method = MeasureMethod::iterated_quadrature;
  res.value = run.value;
  res.grid = grid_per_dim;
  res.roots = run.nodes;
  if (grid_per_dim >= 4) {
    IteratedRun half = iterated_run(p, grid_per_dim / 2);
    res.error_estimate = std::fabs(run.value - half.value);
  } else {
    res.error_estimate = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

double uniform01(std::uint64_t seed, std::uint64_t counter) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return static_cast<double>(mix(seed ^ mix(counter)) >> 11) * 0x1.0p-53;
}

MeasureResult measure_mc(const LaurentPoly& p, long long samples, std::uint64_t seed) {
  if (p.is_zero()) throw precondition_error("Mahler measure of the zero polynomial");
  if (samples < 2) throw precondition_error("need at least 2 samples");
  const int n = p.vars();
  auto terms = compile_terms(p);
  std::vector<double> theta(static_cast<std::size_t>(n));
  KahanSum sum, sumsq;
  std::uint64_t reject_counter = 0x4000000000000000ULL;
  for (long long s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i)
      theta[static_cast<std::size_t>(i)] =
          kTwoPi * uniform01(seed, static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(n) +
                                       static_cast<std::uint64_t>(i));
    Complex val = eval_angles(terms, theta.data(), n);
    while (val == Complex(0.0, 0.0)) {  // measure-zero event: redraw
      for (int i = 0; i < n; ++i)
        theta[static_cast<std::size_t>(i)] = kTwoPi * uniform01(seed, reject_counter++);
      val = eval_angles(terms, theta.data(), n);
    }
    double x = std::log(std::abs(val));
    sum.add(x);
    sumsq.add(x * x);
  }
  MeasureResult res;
  res.method = MeasureMethod::monte_carlo;
  res.samples = samples;
  const double ns = static_cast<double>(samples);
  res.value = sum.get() / ns;
  double var = std::max(0.0, (sumsq.get() - ns * res.value * res.value) / (ns - 1.0));
  res.error_estimate = 3.0 * std::sqrt(var / ns);
  return res;
}

MeasureResult measure_auto(const LaurentPoly& p, int grid_per_dim, long long samples,
                           std::uint64_t seed, bool prefer_mc) {
  if (p.vars() == 1) return measure_univariate_exact(p);
  if (prefer_mc) return measure_mc(p, samples, seed);
  return measure_iterated(p, grid_per_dim);
}

SublevelEstimate sublevel_measure(const LaurentPoly& p, double r, long long samples,
                                  std::uint64_t seed) {
  if (p.is_zero()) throw precondition_error("sublevel measure of the zero polynomial");
  if (r < 0.0) throw precondition_error("sublevel radius must be >= 0");
  if (samples < 1) throw precondition_error("need at least 1 sample");
  const int n = p.vars();
  auto terms = compile_terms(p);
  std::vector<double> theta(static_cast<std::size_t>(n));
  long long hits = 0;
  for (long long s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i)
      theta[static_cast<std::size_t>(i)] =
          kTwoPi * uniform01(seed, static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(n) +
                                       static_cast<std::uint64_t>(i));
    if (std::abs(eval_angles(terms, theta.data(), n)) <= r) ++hits;
  }
  SublevelEstimate est;
  est.samples = samples;
  const double ns = static_cast<double>(samples);
  const double phat = static_cast<double>(hits) / ns;
  est.value = phat;
  const double z = 2.5758293035489004;  // 99% two-sided normal quantile
  const double z2 = z * z;
  const double denom = 1.0 + z2 / ns;
  const double center = phat + z2 / (2.0 * ns);
  const double half = z * std::sqrt(phat * (1.0 - phat) / ns + z2 / (4.0 * ns * ns));
  est.ci_low = std::max(0.0, (center - half) / denom);
  est.ci_high = std::min(1.0, (center + half) / denom);
  return est;
}

namespace {

// mean of `f(theta)` over a uniform periodic grid with `grid` nodes per
// dimension; nodes where skip(theta) holds are dropped from the average
template <typename F>
double grid_mean(const LaurentPoly& q, int grid, F&& value_of) {
  const int m = q.vars();
  double total_d = std::pow(static_cast<double>(grid), m);
  if (total_d > static_cast<double>(1LL << 26)) throw numeric_error("quadrature grid too large");
  const long long total = static_cast<long long>(total_d + 0.5);
  auto terms = compile_terms(q);
  std::vector<long long> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> theta(static_cast<std::size_t>(m));
  KahanSum acc;
  long long used = 0;
  for (long long node = 0; node < total; ++node) {
    for (int i = 0; i < m; ++i)
      theta[static_cast<std::size_t>(i)] = kTwoPi * static_cast<double>(idx[static_cast<std::size_t>(i)]) /
                                           static_cast<double>(grid);
    Complex v = eval_angles(terms, theta.data(), m);
    double x;
    if (value_of(v, &x)) {
      acc.add(x);
      ++used;
    }
    for (int i = 0; i < m; ++i) {
      if (++idx[static_cast<std::size_t>(i)] < grid) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
  }
  if (used == 0) throw numeric_error("no usable quadrature nodes");
  return acc.get() / static_cast<double>(used);
}

template <typename F>
double mc_mean(const LaurentPoly& q, long long samples, std::uint64_t seed, F&& value_of) {
  const int m = q.vars();
  auto terms = compile_terms(q);
  std::vector<double> theta(static_cast<std::size_t>(m));
  KahanSum acc;
  long long used = 0;
  for (long long s = 0; s < samples; ++s) {
    for (int i = 0; i < m; ++i)
      theta[static_cast<std::size_t>(i)] =
          kTwoPi * uniform01(seed, static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(m) +
                                       static_cast<std::uint64_t>(i));
    Complex v = eval_angles(terms, theta.data(), m);
    double x;
    if (value_of(v, &x)) {
      acc.add(x);
      ++used;
    }
  }
  if (used == 0) throw numeric_error("no usable samples");
  return acc.get() / static_cast<double>(used);
}

}  // namespace

double integrate(const TorusIntegrand& f, const SubstMatrix* a, const IntegrateOptions& opt) {
  LaurentPoly q = a ? substitute(f.target, *a) : f.target;
  if (q.is_zero()) throw precondition_error("integrand polynomial vanishes after substitution");

  switch (f.kind) {
    case TorusIntegrand::Kind::log_abs:
      if (opt.monte_carlo) return measure_mc(q, opt.samples, opt.seed).value;
      if (q.vars() == 1) return measure_univariate_exact(q).value;
      return measure_iterated(q, opt.grid).value;

    case TorusIntegrand::Kind::log_abs_squared: {
      auto val = [](Complex v, double* out) {
        if (v == Complex(0.0, 0.0)) return false;  // measure-zero singular node
        double l = std::log(std::abs(v));
        *out = l * l;
        return true;
      };
      if (opt.monte_carlo) return mc_mean(q, opt.samples, opt.seed, val);
      return grid_mean(q, opt.grid, val);
    }

    case TorusIntegrand::Kind::regularized: {
      if (!(f.param > 0.0)) throw precondition_error("regularization epsilon must be positive");
      const double eps = f.param;
      auto val = [eps](Complex v, double* out) {
        *out = 0.5 * std::log(std::norm(v) + eps);
        return true;
      };
      if (opt.monte_carlo) return mc_mean(q, opt.samples, opt.seed, val);
      return grid_mean(q, opt.grid, val);
    }

    case TorusIntegrand::Kind::indicator_below:
      return sublevel_measure(q, f.param, opt.samples, opt.seed).value;
  }
  throw precondition_error("unknown integrand kind");
}

}  // namespace mm
