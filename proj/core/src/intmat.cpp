#include "qlat/intmat.hpp"

#include <cassert>
#include <stdexcept>

namespace qlat {

IMat imat_identity(int n) {
  IMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IMat imat_mul(const IMat& a, const IMat& b) {
  if (a.cols != b.rows) throw std::invalid_argument("imat_mul: shape mismatch");
  IMat c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const Int& aik = a.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

IMat imat_stack(const IMat& top, const IMat& bottom) {
  if (top.rows == 0) return bottom;
  if (bottom.rows == 0) return top;
  if (top.cols != bottom.cols) throw std::invalid_argument("imat_stack: shape mismatch");
  IMat m(top.rows + bottom.rows, top.cols);
  for (int i = 0; i < top.rows; ++i)
    for (int j = 0; j < top.cols; ++j) m.at(i, j) = top.at(i, j);
  for (int i = 0; i < bottom.rows; ++i)
    for (int j = 0; j < bottom.cols; ++j) m.at(top.rows + i, j) = bottom.at(i, j);
  return m;
}

namespace {

void row_sub(IMat& m, int dst, int src, const Int& q, int from_col) {
  if (q == 0) return;
  for (int j = from_col; j < m.cols; ++j) m.at(dst, j) -= q * m.at(src, j);
}

void row_swap(IMat& m, int r1, int r2) {
  if (r1 == r2) return;
  for (int j = 0; j < m.cols; ++j) std::swap(m.at(r1, j), m.at(r2, j));
}

void row_negate(IMat& m, int r) {
  for (int j = 0; j < m.cols; ++j) m.at(r, j) = -m.at(r, j);
}

// Shared echelon routine.  When u != nullptr the same row operations are
// applied to *u (initialised to the identity).
void hnf_inplace(IMat& m, IMat* u, std::vector<int>& pivot_col, int& rank) {
  pivot_col.clear();
  int r = 0;
  for (int col = 0; col < m.cols && r < m.rows; ++col) {
    // Clear column `col` below row r by gcd reduction.
    for (;;) {
      int best = -1;
      for (int i = r; i < m.rows; ++i) {
        if (m.at(i, col) == 0) continue;
        if (best < 0 || mpz_cmpabs(m.at(i, col).get_mpz_t(), m.at(best, col).get_mpz_t()) < 0)
          best = i;
      }
      if (best < 0) break;
      row_swap(m, r, best);
      if (u) row_swap(*u, r, best);
      if (m.at(r, col) < 0) {
        row_negate(m, r);
        if (u) row_negate(*u, r);
      }
      bool cleared = true;
      for (int i = r + 1; i < m.rows; ++i) {
        if (m.at(i, col) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), m.at(i, col).get_mpz_t(), m.at(r, col).get_mpz_t());
        row_sub(m, i, r, q, 0);
        if (u) row_sub(*u, i, r, q, 0);
        if (m.at(i, col) != 0) cleared = false;
      }
      if (cleared) break;
    }
    if (r < m.rows && m.at(r, col) != 0) {
      // Reduce the entries above the new pivot into [0, pivot).
      for (int i = 0; i < r; ++i) {
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), m.at(i, col).get_mpz_t(), m.at(r, col).get_mpz_t());
        row_sub(m, i, r, q, 0);
        if (u) row_sub(*u, i, r, q, 0);
      }
      pivot_col.push_back(col);
      ++r;
    }
  }
  rank = r;
}

}  // namespace

IMat hnf_rows(IMat m) {
  std::vector<int> pivot_col;
  int rank = 0;
  hnf_inplace(m, nullptr, pivot_col, rank);
  IMat h(rank, m.cols);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < m.cols; ++j) h.at(i, j) = m.at(i, j);
  return h;
}

HnfTransform hnf_rows_full(IMat m) {
  HnfTransform t;
  t.u = imat_identity(m.rows);
  hnf_inplace(m, &t.u, t.pivot_col, t.rank);
  t.h = std::move(m);
  return t;
}

bool in_row_lattice(const IMat& h, const std::vector<Int>& v,
                    std::vector<Int>* coeff) {
  if (static_cast<int>(v.size()) != h.cols)
    throw std::invalid_argument("in_row_lattice: size mismatch");
  std::vector<Int> rem = v;
  std::vector<Int> c(h.rows);
  for (int i = 0; i < h.rows; ++i) {
    int p = -1;
    for (int j = 0; j < h.cols; ++j)
      if (h.at(i, j) != 0) { p = j; break; }
    if (p < 0) continue;
    if (rem[p] == 0) continue;
    Int q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rem[p].get_mpz_t(), h.at(i, p).get_mpz_t());
    if (r != 0) return false;
    c[i] = q;
    for (int j = p; j < h.cols; ++j) rem[j] -= q * h.at(i, j);
  }
  for (const Int& x : rem)
    if (x != 0) return false;
  if (coeff) *coeff = std::move(c);
  return true;
}

Int lattice_index(const IMat& h) {
  if (h.rows < h.cols) return 0;
  Int idx = 1;
  int i = 0;
  for (int j = 0; j < h.cols; ++j) {
    if (i >= h.rows || h.at(i, j) == 0) return 0;
    idx *= h.at(i, j);
    ++i;
  }
  return idx;
}

LinSolve solve_integer(const IMat& a, const std::vector<Int>& b) {
  if (static_cast<int>(b.size()) != a.rows)
    throw std::invalid_argument("solve_integer: size mismatch");
  // Transpose so that solutions of x * a^T = b^T come from HNF rows.
  IMat at(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) at.at(j, i) = a.at(i, j);
  HnfTransform t = hnf_rows_full(std::move(at));

  LinSolve s;
  std::vector<Int> rem = b;
  std::vector<Int> w(t.rank);
  for (int i = 0; i < t.rank; ++i) {
    int p = t.pivot_col[i];
    Int q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rem[p].get_mpz_t(), t.h.at(i, p).get_mpz_t());
    if (r != 0) return s;
    w[i] = q;
    for (int j = p; j < t.h.cols; ++j) rem[j] -= q * t.h.at(i, j);
  }
  for (const Int& x : rem)
    if (x != 0) return s;

  s.ok = true;
  s.x0.assign(a.cols, 0);
  for (int i = 0; i < t.rank; ++i)
    for (int j = 0; j < a.cols; ++j) s.x0[j] += w[i] * t.u.at(i, j);
  s.kernel = IMat(t.u.rows - t.rank, a.cols);
  for (int i = t.rank; i < t.u.rows; ++i)
    for (int j = 0; j < a.cols; ++j) s.kernel.at(i - t.rank, j) = t.u.at(i, j);
  return s;
}

std::vector<Int> smith_invariant_factors(IMat m) {
  std::vector<Int> out;
  int top = 0;
  while (true) {
    // Find the entry of least nonzero absolute value in the active block.
    int bi = -1, bj = -1;
    for (int i = top; i < m.rows; ++i)
      for (int j = top; j < m.cols; ++j) {
        if (m.at(i, j) == 0) continue;
        if (bi < 0 || mpz_cmpabs(m.at(i, j).get_mpz_t(), m.at(bi, bj).get_mpz_t()) < 0) {
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;
    row_swap(m, top, bi);
    for (int i = 0; i < m.rows; ++i) std::swap(m.at(i, top), m.at(i, bj));
    if (m.at(top, top) < 0) row_negate(m, top);

    bool again = false;
    for (int i = top + 1; i < m.rows; ++i) {
      if (m.at(i, top) == 0) continue;
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), m.at(i, top).get_mpz_t(), m.at(top, top).get_mpz_t());
      row_sub(m, i, top, q, 0);
      if (m.at(i, top) != 0) again = true;
    }
    for (int j = top + 1; j < m.cols; ++j) {
      if (m.at(top, j) == 0) continue;
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), m.at(top, j).get_mpz_t(), m.at(top, top).get_mpz_t());
      if (q != 0)
        for (int i = 0; i < m.rows; ++i) m.at(i, j) -= q * m.at(i, top);
      if (m.at(top, j) != 0) again = true;
    }
    if (again) continue;

    // Enforce divisibility of the remaining block by the pivot.
    bool fixed = true;
    for (int i = top + 1; i < m.rows && fixed; ++i)
      for (int j = top + 1; j < m.cols && fixed; ++j)
        if (m.at(i, j) % m.at(top, top) != 0) {
          for (int jj = top; jj < m.cols; ++jj) m.at(top, jj) += m.at(i, jj);
          fixed = false;
        }
    if (!fixed) continue;
    out.push_back(m.at(top, top));
    ++top;
    if (top >= m.rows || top >= m.cols) break;
  }
  return out;
}

Int det_bareiss(IMat m) {
  if (m.rows != m.cols) throw std::invalid_argument("det_bareiss: not square");
  int n = m.rows;
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m.at(k, k) == 0) {
      int sw = -1;
      for (int i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) { sw = i; break; }
      if (sw < 0) return 0;
      row_swap(m, k, sw);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        Int num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
        mpz_divexact(m.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m.at(k, k);
  }
  return sign > 0 ? m.at(n - 1, n - 1) : -m.at(n - 1, n - 1);
}

}  // namespace qlat
