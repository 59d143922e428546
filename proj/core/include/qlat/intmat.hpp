#pragma once
// Exact integer linear algebra over GMP: Hermite normal form (row style),
// integral system solving, Smith invariant factors, determinants.
#include <gmpxx.h>
#include <vector>

namespace qlat {

using Int = mpz_class;

// Dense matrix of arbitrary-precision integers, row major.
struct IMat {
  int rows = 0, cols = 0;
  std::vector<Int> a;

  IMat() = default;
  IMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

  Int& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  const Int& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  bool operator==(const IMat&) const = default;
};

IMat imat_identity(int n);
IMat imat_mul(const IMat& a, const IMat& b);
IMat imat_stack(const IMat& top, const IMat& bottom);

// Canonical row Hermite normal form: pivots positive, entries above each
// pivot reduced into [0, pivot), zero rows dropped, rows ordered by pivot
// column.  Two row lattices are equal iff their HNFs are identical.
IMat hnf_rows(IMat m);

// Full variant keeping zero rows and the unimodular transform:
// u * m == h, u square unimodular, h in row echelon HNF with `rank`
// nonzero rows whose pivot columns are pivot_col[0..rank-1].
struct HnfTransform {
  IMat h;
  IMat u;
  std::vector<int> pivot_col;
  int rank = 0;
};
HnfTransform hnf_rows_full(IMat m);

// Does v lie in the row lattice of h (h must be the output of hnf_rows)?
// If coeff is non-null and the answer is yes, *coeff holds the row
// combination: v = coeff * h.
bool in_row_lattice(const IMat& h, const std::vector<Int>& v,
                    std::vector<Int>* coeff = nullptr);

// Index of the row lattice of h inside Z^cols: product of pivots when h
// has full column rank, otherwise 0.
Int lattice_index(const IMat& h);

// Solve a * x = b over the integers, a of shape m x k.
// On success x0 is one solution and the rows of kernel span all
// homogeneous solutions.
struct LinSolve {
  bool ok = false;
  std::vector<Int> x0;
  IMat kernel;
};
LinSolve solve_integer(const IMat& a, const std::vector<Int>& b);

// Nonzero Smith invariant factors, ascending divisibility d1 | d2 | ...
std::vector<Int> smith_invariant_factors(IMat m);

// Determinant of a square matrix (fraction-free Gaussian elimination).
Int det_bareiss(IMat m);

}  // namespace qlat
