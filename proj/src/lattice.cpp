#include "mm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <string>

#include "mm/errors.hpp"

namespace mm {

namespace {

constexpr long long kEntryLimit = 1'000'000'000'000'000LL;  // 1e15 growth guard

void check_magnitude(long long v) {
  if (v > kEntryLimit || v < -kEntryLimit)
    throw numeric_error("integer overflow risk during kernel reduction");
}

// column operation col_j -= q * col_k on an n x n matrix stored column-wise
void col_axpy(std::vector<IntVec>& cols, std::size_t j, std::size_t k, long long q) {
  if (q == 0) return;
  for (std::size_t r = 0; r < cols[j].size(); ++r) {
    cols[j][r] -= q * cols[k][r];
    check_magnitude(cols[j][r]);
  }
}

}  // namespace

std::vector<IntVec> integer_kernel_basis(int rows, int cols_n, const std::vector<long long>& entries) {
  if (rows < 0 || cols_n < 0 || entries.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols_n))
    throw precondition_error("matrix dimensions do not match entry count");
  const std::size_t n = static_cast<std::size_t>(cols_n);
  // M holds the working copy of A, U the accumulated unimodular column ops.
  std::vector<IntVec> m_cols(n, IntVec(static_cast<std::size_t>(rows), 0));
  std::vector<IntVec> u_cols(n, IntVec(n, 0));
  for (std::size_t j = 0; j < n; ++j) {
    u_cols[j][j] = 1;
    for (int i = 0; i < rows; ++i)
      m_cols[j][static_cast<std::size_t>(i)] = entries[static_cast<std::size_t>(i) * n + j];
  }

  std::size_t pivot = 0;
  for (int i = 0; i < rows && pivot < n; ++i) {
    std::size_t r = static_cast<std::size_t>(i);
    // gcd-sweep row i across columns pivot..n-1 until a single nonzero remains
    while (true) {
      std::size_t best = n;
      for (std::size_t j = pivot; j < n; ++j) {
        if (m_cols[j][r] == 0) continue;
        if (best == n || std::llabs(m_cols[j][r]) < std::llabs(m_cols[best][r])) best = j;
      }
      if (best == n) break;  // row is zero from pivot on
      std::swap(m_cols[pivot], m_cols[best]);
      std::swap(u_cols[pivot], u_cols[best]);
      bool cleared = true;
      for (std::size_t j = pivot + 1; j < n; ++j) {
        if (m_cols[j][r] == 0) continue;
        long long q = m_cols[j][r] / m_cols[pivot][r];
        col_axpy(m_cols, j, pivot, q);
        col_axpy(u_cols, j, pivot, q);
        if (m_cols[j][r] != 0) cleared = false;
      }
      if (cleared) {
        ++pivot;
        break;
      }
    }
  }

  std::vector<IntVec> basis;
  for (std::size_t j = pivot; j < n; ++j) {
    IntVec v = u_cols[j];
    // sign normalization: last nonzero entry positive
    for (std::size_t r = v.size(); r-- > 0;) {
      if (v[r] != 0) {
        if (v[r] < 0)
          for (auto& x : v) x = -x;
        break;
      }
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

namespace {

// Coefficient box radii: any lattice vector v = B c with ||v||_inf <= R has
// |c_j| <= g_j * R, where g_j is the j-th row sum of |(B^T B)^{-1} B^T|.
std::vector<double> coeff_box_gains(const std::vector<IntVec>& basis) {
  const std::size_t d = basis.size();
  const std::size_t n = basis[0].size();
  std::vector<std::vector<double>> g(d, std::vector<double>(d, 0.0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t r = 0; r < n; ++r)
        g[a][b] += static_cast<double>(basis[a][r]) * static_cast<double>(basis[b][r]);
  // invert the Gram matrix (d <= 8 at desk scale) by Gauss-Jordan
  std::vector<std::vector<double>> inv(d, std::vector<double>(d, 0.0));
  for (std::size_t a = 0; a < d; ++a) inv[a][a] = 1.0;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::fabs(g[r][c]) > std::fabs(g[piv][c])) piv = r;
    std::swap(g[piv], g[c]);
    std::swap(inv[piv], inv[c]);
    if (g[c][c] == 0.0) throw numeric_error("kernel basis is not full rank");
    double s = 1.0 / g[c][c];
    for (std::size_t j = 0; j < d; ++j) {
      g[c][j] *= s;
      inv[c][j] *= s;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c) continue;
      double f = g[r][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        g[r][j] -= f * g[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  // rows of |G^{-1} B^T|
  std::vector<double> gains(d, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t r = 0; r < n; ++r) {
      double x = 0.0;
      for (std::size_t b = 0; b < d; ++b) x += inv[a][b] * static_cast<double>(basis[b][r]);
      gains[a] += std::fabs(x);
    }
  }
  return gains;
}

template <typename Fn>
void enumerate_box(const std::vector<IntVec>& basis, const std::vector<long long>& box,
                   std::size_t budget, Fn&& visit) {
  const std::size_t d = basis.size();
  const std::size_t n = basis[0].size();
  double count = 1.0;
  for (auto c : box) count *= static_cast<double>(2 * c + 1);
  if (count > static_cast<double>(budget))
    throw numeric_error("lattice enumeration budget exceeded");
  std::vector<long long> c(d);
  for (std::size_t j = 0; j < d; ++j) c[j] = -box[j];
  IntVec v(n);
  while (true) {
    bool zero = std::all_of(c.begin(), c.end(), [](long long x) { return x == 0; });
    if (!zero) {
      for (std::size_t r = 0; r < n; ++r) {
        long long acc = 0;
        for (std::size_t j = 0; j < d; ++j) acc += c[j] * basis[j][r];
        v[r] = acc;
      }
      visit(v);
    }
    std::size_t j = 0;
    while (j < d && c[j] == box[j]) {
      c[j] = -box[j];
      ++j;
    }
    if (j == d) break;
    ++c[j];
  }
}

std::vector<long long> box_for_radius(const std::vector<IntVec>& basis, long long radius) {
  std::vector<double> gains = coeff_box_gains(basis);
  std::vector<long long> box(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    box[j] = static_cast<long long>(std::floor(gains[j] * static_cast<double>(radius) + 1e-9));
  return box;
}

long long linf(const IntVec& v) {
  long long m = 0;
  for (auto x : v) m = std::max(m, std::llabs(x));
  return m;
}

}  // namespace

long long shortest_linf(const std::vector<IntVec>& basis, std::size_t budget) {
  if (basis.empty()) return kRhoInfinity;
  long long upper = kRhoInfinity;
  for (const auto& b : basis) upper = std::min(upper, linf(b));
  // Every v with ||v||_inf <= upper lies inside the coefficient box, so the
  // minimum over the box is the exact first minimum.
  long long best = upper;
  enumerate_box(basis, box_for_radius(basis, upper), budget, [&](const IntVec& v) {
    long long nv = linf(v);
    if (nv > 0) best = std::min(best, nv);
  });
  return best;
}

std::vector<IntVec> lattice_points_within(const std::vector<IntVec>& basis, long long radius,
                                          std::size_t budget) {
  std::vector<IntVec> out;
  if (basis.empty() || radius <= 0) return out;
  enumerate_box(basis, box_for_radius(basis, radius), budget, [&](const IntVec& v) {
    if (linf(v) <= radius) out.push_back(v);
  });
  std::sort(out.begin(), out.end());
  return out;
}

SubstMatrix make_subst_matrix(int rows, int cols, std::vector<long long> entries, std::size_t budget) {
  SubstMatrix a;
  a.rows = rows;
  a.cols = cols;
  a.entries = std::move(entries);
  a.kernel = integer_kernel_basis(rows, cols, a.entries);
  a.d = static_cast<int>(a.kernel.size());
  a.rho = shortest_linf(a.kernel, budget);
  // sanity: A b = 0 for every basis vector
  for (const auto& b : a.kernel) {
    for (int i = 0; i < rows; ++i) {
      long long acc = 0;
      for (int j = 0; j < cols; ++j) acc += a.at(i, j) * b[static_cast<std::size_t>(j)];
      if (acc != 0) throw numeric_error("kernel basis verification failed");
    }
  }
  return a;
}

LaurentPoly substitute(const LaurentPoly& p, const SubstMatrix& a) {
  if (a.cols != p.vars()) throw precondition_error("matrix column count != variable count");
  // collect images, then sum collisions in deterministic order with
  // Neumaier compensation
  std::vector<std::pair<Exponents, Complex>> images;
  images.reserve(p.term_count());
  Exponents w(static_cast<std::size_t>(a.rows));
  for (const auto& [v, c] : p.terms()) {
    for (int i = 0; i < a.rows; ++i) {
      long long acc = 0;
      for (int j = 0; j < a.cols; ++j) acc += a.at(i, j) * v[static_cast<std::size_t>(j)];
      check_magnitude(acc);
      w[static_cast<std::size_t>(i)] = acc;
    }
    images.emplace_back(w, c);
  }
  std::sort(images.begin(), images.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  LaurentPoly out(a.rows);
  std::size_t i = 0;
  while (i < images.size()) {
    std::size_t j = i;
    double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
    while (j < images.size() && images[j].first == images[i].first) {
      double xr = images[j].second.real(), xi = images[j].second.imag();
      double tr = sr + xr;
      cr += (std::fabs(sr) >= std::fabs(xr)) ? (sr - tr) + xr : (xr - tr) + sr;
      sr = tr;
      double ti = si + xi;
      ci += (std::fabs(si) >= std::fabs(xi)) ? (si - ti) + xi : (xi - ti) + si;
      si = ti;
      ++j;
    }
    out.add_term(images[i].first, Complex(sr + cr, si + ci));
    i = j;
  }
  return out;
}

double lattice_exp_sum(const std::vector<IntVec>& basis, double r, double cutoff) {
  if (!(r > 1.0)) throw precondition_error("lattice_exp_sum requires r > 1");
  if (!(cutoff > 0.0)) throw precondition_error("cutoff must be positive");
  if (basis.empty()) return 0.0;
  const double d = static_cast<double>(basis.size());
  const long long rho = shortest_linf(basis);
  const double logr = std::log(r);

  // tail over ||v|| > R:  (1 - 1/r) * sum_{q>R} (2q/rho + 1)^d r^{-q},
  // dominated by a geometric series from the first term.
  auto tail_bound = [&](long long R) {
    double q0 = static_cast<double>(R + 1);
    double first = std::pow(2.0 * q0 / static_cast<double>(rho) + 1.0, d) * std::exp(-logr * q0);
    double gamma = std::exp(2.0 * d / (2.0 * q0 + static_cast<double>(rho))) / r;
    if (gamma >= 1.0) return std::numeric_limits<double>::infinity();
    return (1.0 - 1.0 / r) * first / (1.0 - gamma);
  };

  long long radius = rho;
  while (tail_bound(radius) >= cutoff) {
    radius = radius < 16 ? radius + 8 : radius * 2;
    if (radius > 4'000'000) throw numeric_error("lattice_exp_sum truncation radius too large");
  }

  double sum = 0.0, comp = 0.0;
  enumerate_box(basis, box_for_radius(basis, radius), 1u << 27, [&](const IntVec& v) {
    long long nv = linf(v);
    if (nv == 0 || nv > radius) return;
    double x = std::exp(-logr * static_cast<double>(nv));
    double t = sum + x;
    comp += (std::fabs(sum) >= std::fabs(x)) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  });
  return sum + comp;
}

SubstMatrix parse_matrix(std::string_view text, std::size_t budget) {
  std::vector<std::vector<long long>> rows;
  std::string row_text;
  std::stringstream all{std::string(text)};
  while (std::getline(all, row_text, ';')) {
    for (auto& ch : row_text)
      if (ch == ',') ch = ' ';
    std::stringstream rs(row_text);
    std::vector<long long> row;
    long long v;
    while (rs >> v) row.push_back(v);
    if (!rs.eof()) throw parse_error("bad matrix entry", 0);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("empty matrix", 0);
  for (const auto& r : rows)
    if (r.size() != rows[0].size()) throw parse_error("ragged matrix rows", 0);
  std::vector<long long> entries;
  for (const auto& r : rows) entries.insert(entries.end(), r.begin(), r.end());
  return make_subst_matrix(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()),
                           std::move(entries), budget);
}

std::string matrix_to_string(const SubstMatrix& a) {
  std::string out;
  for (int i = 0; i < a.rows; ++i) {
    if (i) out += "; ";
    for (int j = 0; j < a.cols; ++j) {
      if (j) out += " ";
      out += std::to_string(a.at(i, j));
    }
  }
  return out;
}

}  // namespace mm
