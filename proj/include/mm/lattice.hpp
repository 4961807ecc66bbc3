#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include "mm/laurent.hpp"

namespace mm {

using IntVec = std::vector<long long>;

// rho(A) when the kernel lattice is trivial.
inline constexpr long long kRhoInfinity = std::numeric_limits<long long>::max();

// Integer substitution matrix A (rows x cols) with its cached kernel lattice
// data: a Z-basis of Lambda_A = ker(A) cap Z^n, d = dim ker(A), and the first
// successive minimum rho = min ||v||_inf over nonzero lattice vectors.
// Immutable after construction.
struct SubstMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<long long> entries;  // row-major, rows*cols
  std::vector<IntVec> kernel;      // d vectors of length cols
  int d = 0;
  long long rho = kRhoInfinity;

  long long at(int i, int j) const { return entries[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)]; }
};

// Builds the matrix and computes kernel basis, d(A) and rho(A) eagerly.
// `budget` caps the number of enumeration candidates for rho.
SubstMatrix make_subst_matrix(int rows, int cols, std::vector<long long> entries,
                              std::size_t budget = 1u << 26);

// Z-basis of ker(A) cap Z^n via unimodular integer column reduction; empty
// when A has full column rank. Each basis vector is normalized so that its
// last nonzero entry is positive.
std::vector<IntVec> integer_kernel_basis(int rows, int cols, const std::vector<long long>& entries);

// Exact min ||v||_inf over nonzero vectors of the lattice spanned by `basis`,
// by exhaustive enumeration of a provably sufficient coefficient box.
// Returns kRhoInfinity for an empty basis. Throws numeric_error when the box
// exceeds `budget` candidates.
long long shortest_linf(const std::vector<IntVec>& basis, std::size_t budget = 1u << 26);

// All nonzero lattice vectors with ||v||_inf <= radius.
std::vector<IntVec> lattice_points_within(const std::vector<IntVec>& basis, long long radius,
                                          std::size_t budget = 1u << 26);

// P_A: each term c_v z^v maps to c_v z^{A v}; colliding images are summed
// with compensated summation. The result may be the zero polynomial.
LaurentPoly substitute(const LaurentPoly& p, const SubstMatrix& a);

// Truncation of sum_{v in Lambda \ {0}} r^{-||v||_inf} with the tail bounded
// below `cutoff` via the (2q/rho + 1)^d ball-count estimate. Requires r > 1.
double lattice_exp_sum(const std::vector<IntVec>& basis, double r, double cutoff);

// Text format: rows separated by ';', entries by whitespace or commas.
SubstMatrix parse_matrix(std::string_view text, std::size_t budget = 1u << 26);

std::string matrix_to_string(const SubstMatrix& a);

}  // namespace mm
