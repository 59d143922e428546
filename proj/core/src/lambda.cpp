#include "qlat/lambda.hpp"

#include <algorithm>

#include "qlat/error.hpp"
#include "qlat/words.hpp"

namespace qlat {

RingElem sigma_x(const RingPtr& r, long m) {
  if (m < 0) fail(Errc::BadInput, "sigma_x needs m >= 0");
  RingElem s = ring_zero(r);
  for (long i = 0; i < m; ++i) s = elem_add(s, monomial(r, i));
  return s;
}

namespace {

// Fox derivative of x^m with respect to x, as an element of Z<x>.
RingElem fox_power(const RingPtr& r, long m) {
  if (m >= 0) return sigma_x(r, m);
  RingElem s = ring_zero(r);
  for (long i = 1; i <= -m; ++i) s = elem_sub(s, monomial(r, -i));
  return s;
}

}  // namespace

RingElem lambda_of(const FamilyPresentation& p) {
  validate(p);
  RingPtr zq = ring_zq4n(p.n);
  std::vector<long> ns = p.ns, ms = p.ms;
  ns.push_back(tail_n(p));
  ms.push_back(tail_m(p));
  RingElem lam = ring_zero(zq);
  long shift = 0;
  for (size_t i = 0; i < ns.size(); ++i) {
    lam = elem_add(lam, elem_mul(monomial(zq, shift), fox_power(zq, ns[i])));
    shift += ns[i] - ms[i];
  }
  // cross-check the defining property against honest Fox derivatives
  Word rel = relator(p);
  RingElem dx = fox_derivative(zq, rel, 'x');
  RingElem dy = fox_derivative(zq, rel, 'y');
  RingElem xy1 = elem_add(ring_one(zq), monomial(zq, 1, 1));
  RingElem xm1 = elem_sub(monomial(zq, 1), ring_one(zq));
  if (!elem_eq(dx, elem_mul(lam, xy1)) || !elem_eq(dy, elem_mul(lam, xm1)))
    fail(Errc::BadInput, "lambda_of: Fox factorization failed (unexpected)");
  return lam;
}

// ---------------------------------------------------------------------------
// canonical coset point
// ---------------------------------------------------------------------------

namespace {

// entry order 0 < 1 < -1 < 2 < -2 < ...
bool entry_less(const Int& a, const Int& b) {
  int c = mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t());
  if (c != 0) return c < 0;
  return a > b;  // same magnitude: positive first
}

Int inf_norm(const std::vector<Int>& v) {
  Int m = 0;
  for (const Int& x : v)
    if (mpz_cmpabs(x.get_mpz_t(), m.get_mpz_t()) > 0) m = abs(x);
  return m;
}

struct BoundedSearch {
  const IMat& h;  // HNF rows, rank m, width w
  std::vector<int> piv;
  int m, w;
  Int bound;
  long nodes = 0;
  long cap;
  bool capped = false;
  std::vector<Int> cur;
  std::vector<Int> witness;
  bool found = false;

  BoundedSearch(const IMat& h_, const std::vector<int>& piv_, Int b, long cap_)
      : h(h_), piv(piv_), m(h_.rows), w(h_.cols), bound(std::move(b)), cap(cap_) {}

  bool range_ok(int from, int to) const {
    for (int j = from; j < to; ++j)
      if (mpz_cmpabs(cur[j].get_mpz_t(), bound.get_mpz_t()) > 0) return false;
    return true;
  }

  bool dfs(int row) {
    if (row == m) {
      found = true;
      witness = cur;
      return true;
    }
    int p = piv[row];
    const Int& a = h.at(row, p);
    // |cur[p] + c*a| <= bound
    Int lo = -bound - cur[p], hi = bound - cur[p];
    Int clo, chi;
    mpz_cdiv_q(clo.get_mpz_t(), lo.get_mpz_t(), a.get_mpz_t());
    mpz_fdiv_q(chi.get_mpz_t(), hi.get_mpz_t(), a.get_mpz_t());
    int next_final = (row + 1 < m) ? piv[row + 1] : w;
    for (Int c = clo; c <= chi; ++c) {
      if (++nodes > cap) {
        capped = true;
        return false;
      }
      if (c != 0)
        for (int j = p; j < w; ++j) cur[j] += c * h.at(row, j);
      if (range_ok(p, next_final) && dfs(row + 1)) {
        if (c != 0)
          for (int j = p; j < w; ++j) cur[j] -= c * h.at(row, j);
        return true;
      }
      if (c != 0)
        for (int j = p; j < w; ++j) cur[j] -= c * h.at(row, j);
      if (capped) return false;
    }
    return false;
  }

  bool run(const std::vector<Int>& x0) {
    cur = x0;
    found = false;
    nodes = 0;
    capped = false;
    int first = m ? piv[0] : w;
    if (!range_ok(0, first)) return false;
    return dfs(0);
  }
};

std::vector<int> pivot_cols(const IMat& h) {
  std::vector<int> piv(h.rows, -1);
  for (int i = 0; i < h.rows; ++i) {
    for (int j = 0; j < h.cols; ++j)
      if (h.at(i, j) != 0) {
        piv[i] = j;
        break;
      }
    if (piv[i] < 0) fail(Errc::BadInput, "zero kernel row (unexpected)");
  }
  return piv;
}

std::vector<Int> babai_point(const std::vector<Int>& x0, const IMat& h,
                             const std::vector<int>& piv) {
  std::vector<Int> v = x0;
  for (int i = h.rows - 1; i >= 0; --i) {
    int p = piv[i];
    const Int& a = h.at(i, p);
    Int t, num = 2 * v[p] + a, den = 2 * a;
    mpz_fdiv_q(t.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (t != 0)
      for (int j = p; j < h.cols; ++j) v[j] -= t * h.at(i, j);
  }
  return v;
}

constexpr long kExistCap = 3000000;
constexpr long kLexInnerCap = 300000;

}  // namespace

std::vector<Int> canonical_coset_point(const std::vector<Int>& x0, const IMat& kernel) {
  if (kernel.rows == 0) return x0;
  IMat h = hnf_rows(kernel);
  if (h.rows == 0) return x0;
  std::vector<int> piv = pivot_cols(h);
  int w = h.cols;
  std::vector<Int> fallback = babai_point(x0, h, piv);
  Int bmax = inf_norm(fallback);
  // phase 1: minimal max-abs bound
  Int bstar = -1;
  std::vector<Int> witness = fallback;
  for (Int b = 0; b <= bmax; ++b) {
    BoundedSearch s(h, piv, b, kExistCap);
    if (s.run(x0)) {
      bstar = b;
      witness = s.witness;
      break;
    }
    if (s.capped) return fallback;
  }
  if (bstar < 0) return fallback;
  // phase 2: lexicographic minimization at bound bstar, fixing entries in order
  std::vector<std::pair<int, Int>> fixed;
  std::vector<Int> best = witness;
  long total_nodes = 0;
  for (int pos = 0; pos < w; ++pos) {
    // candidate values in entry order, stopping at the current witness value
    std::vector<Int> cands;
    for (Int v = 0; v <= bstar; ++v) {
      cands.push_back(v);
      if (v != 0) cands.push_back(-v);
    }
    bool fixed_this = false;
    for (const Int& val : cands) {
      if (!entry_less(val, best[pos]) && val != best[pos]) continue;
      if (val == best[pos]) {
        fixed.push_back({pos, val});
        fixed_this = true;
        break;
      }
      // does a point exist with this prefix?  constrain and search
      std::vector<std::pair<int, Int>> trial = fixed;
      trial.push_back({pos, val});
      IMat a(static_cast<int>(trial.size()), h.rows);
      std::vector<Int> rhs(trial.size());
      for (size_t t = 0; t < trial.size(); ++t) {
        for (int i = 0; i < h.rows; ++i) a.at(static_cast<int>(t), i) = h.at(i, trial[t].first);
        rhs[t] = trial[t].second - x0[trial[t].first];
      }
      LinSolve ls = solve_integer(a, rhs);
      if (!ls.ok) continue;
      std::vector<Int> x1 = x0;
      for (int i = 0; i < h.rows; ++i)
        if (ls.x0[i] != 0)
          for (int j = piv[i]; j < w; ++j) x1[j] += ls.x0[i] * h.at(i, j);
      if (ls.kernel.rows == 0) {
        if (inf_norm(x1) <= bstar) {
          best = x1;
          fixed.push_back({pos, val});
          fixed_this = true;
        }
        if (fixed_this) break;
        continue;
      }
      IMat h2(ls.kernel.rows, w);
      for (int i = 0; i < ls.kernel.rows; ++i)
        for (int j = 0; j < w; ++j) {
          Int s = 0;
          for (int k = 0; k < h.rows; ++k)
            if (ls.kernel.at(i, k) != 0) s += ls.kernel.at(i, k) * h.at(k, j);
          h2.at(i, j) = s;
        }
      IMat h2n = hnf_rows(h2);
      if (h2n.rows == 0) {
        if (inf_norm(x1) <= bstar) {
          best = x1;
          fixed.push_back({pos, val});
          fixed_this = true;
          break;
        }
        continue;
      }
      std::vector<int> piv2 = pivot_cols(h2n);
      BoundedSearch s(h2n, piv2, bstar, kLexInnerCap);
      bool okk = s.run(x1);
      total_nodes += s.nodes;
      if (s.capped || total_nodes > 20 * kLexInnerCap) return best;
      if (okk) {
        best = s.witness;
        fixed.push_back({pos, val});
        fixed_this = true;
        break;
      }
    }
    if (!fixed_this) fixed.push_back({pos, best[pos]});
  }
  return best;
}

// ---------------------------------------------------------------------------
// unit equation
// ---------------------------------------------------------------------------

UnitEquationSolution solve_unit_equation(const RingElem& lambda, int n) {
  const RingPtr& zq = lambda.ring;
  if (zq->tag.kind != RingKind::IntegralQ4n || zq->tag.n != n)
    fail(Errc::TagMismatch, "solve_unit_equation needs lambda in ZQ_4n");
  if (lambda.den != 1) fail(Errc::BadInput, "lambda must be integral");
  for (int i = zq->deg; i < 2 * zq->deg; ++i)
    if (lambda.c[i] != 0) fail(Errc::BadInput, "lambda must be supported on <x>");
  RingElem lbar = involution(lambda);
  // fold C_2n -> C_n
  std::vector<Int> q(n, Int(0)), qbar(n, Int(0));
  for (int i = 0; i < 2 * n; ++i) {
    q[i % n] += lambda.c[i];
    qbar[i % n] += lbar.c[i];
  }
  // unknowns (gamma || delta); row i: sum_j gamma_j qbar[(i-j) mod n]
  //                                  + sum_j delta_j q[(i-j) mod n] = [i == 0]
  IMat a(n, 2 * n);
  std::vector<Int> b(n, Int(0));
  b[0] = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a.at(i, j) = qbar[((i - j) % n + n) % n];
      a.at(i, n + j) = q[((i - j) % n + n) % n];
    }
  LinSolve ls = solve_integer(a, b);
  UnitEquationSolution out;
  if (!ls.ok) return out;  // NoSolution verdict
  std::vector<Int> sol = canonical_coset_point(ls.x0, ls.kernel);
  std::vector<Int> gamma_c(sol.begin(), sol.begin() + n);
  std::vector<Int> delta_c(sol.begin() + n, sol.end());
  RingElem gamma = ring_zero(zq), delta = ring_zero(zq);
  for (int i = 0; i < n; ++i) {
    gamma.c[i] = gamma_c[i];
    delta.c[i] = delta_c[i];
  }
  // c = delta*lambda + gamma*lbar - 1 lies in (x^n - 1) Z<x>
  RingElem c = elem_sub(elem_add(elem_mul(delta, lambda), elem_mul(gamma, lbar)),
                        ring_one(zq));
  for (int i = 0; i < n; ++i)
    if (c.c[i] + c.c[n + i] != 0)
      fail(Errc::BadInput, "unit equation lift: c not antisymmetric (unexpected)");
  RingElem eps = ring_zero(zq);
  for (int i = 0; i < n; ++i) eps.c[i] = c.c[i];
  RingElem xy = monomial(zq, 1, 1);
  RingElem alpha = elem_add(elem_sub(eps, elem_mul(gamma, lbar)), elem_mul(eps, xy));
  RingElem beta = elem_add(delta, elem_mul(gamma, xy));
  RingElem check = elem_add(elem_mul(alpha, elem_sub(xy, ring_one(zq))),
                            elem_mul(beta, lambda));
  if (!elem_eq(check, ring_one(zq)))
    fail(Errc::BadInput, "unit equation lift failed to verify (unexpected)");
  out.found = true;
  out.alpha = alpha;
  out.beta = beta;
  out.delta = delta;
  out.gamma = gamma;
  return out;
}

MpAlpha mp_alpha(int n, long r) {
  if (n < 2) fail(Errc::BadInput, "mp_alpha needs n >= 2");
  // The closed forms are literal in x^r, so match the congruence modulo the
  // exponent period 2n; eligibility (3 | n and r = 2 mod 3 has no t) is the
  // same either way.
  long t = -1;
  int residue = 0;
  for (long cand = 0; cand < 2 * n; ++cand) {
    if (((r - 3 * cand) % (2 * n) + 2 * n) % (2 * n) == 0) {
      t = cand;
      residue = 0;
      break;
    }
    if (((r - 3 * cand - 1) % (2 * n) + 2 * n) % (2 * n) == 0) {
      t = cand;
      residue = 1;
      break;
    }
  }
  if (t < 0)
    fail(Errc::NoEligibleT, "no t with r = 3t or 3t+1 mod n (3 | n and r = 2 mod 3)");
  RingPtr zq = ring_zq4n(n);
  RingElem one = ring_one(zq);
  RingElem x = monomial(zq, 1);
  RingElem xm1 = elem_sub(x, one);
  auto sum3 = [&](long count) {  // sum_{i=0}^{count-1} x^{3i}
    RingElem s = ring_zero(zq);
    for (long i = 0; i < count; ++i) s = elem_add(s, monomial(zq, 3 * i));
    return s;
  };
  RingElem core = elem_sub(elem_add(monomial(zq, r), monomial(zq, r - 1)), one);
  RingElem alpha = elem_neg(elem_mul(elem_mul(xm1, sum3(t)), core));
  if (residue == 1) alpha = elem_mul(monomial(zq, 2), alpha);
  RingElem beta;
  if (residue == 0) {
    // beta = x + x^2(x^2-1) sum_{i<t-1} x^{3i} + x^{r+1}(x-1) sum_{i<t} x^{3i} y
    RingElem mid = elem_mul(elem_mul(monomial(zq, 2), elem_sub(monomial(zq, 2), one)),
                            sum3(t - 1));
    RingElem ypart = elem_mul(elem_mul(monomial(zq, r + 1), xm1),
                              elem_mul(sum3(t), monomial(zq, 0, 1)));
    beta = elem_add(elem_add(x, mid), ypart);
  } else {
    // beta = 1 + x(x^2-1) sum_{i<t} x^{3i} + x^{r+3}(x-1) sum_{i<t} x^{3i} y
    RingElem mid =
        elem_mul(elem_mul(x, elem_sub(monomial(zq, 2), one)), sum3(t));
    RingElem ypart = elem_mul(elem_mul(monomial(zq, r + 3), xm1),
                              elem_mul(sum3(t), monomial(zq, 0, 1)));
    beta = elem_add(elem_add(one, mid), ypart);
  }
  RingElem lam = elem_sub(elem_add(one, x), monomial(zq, r));
  RingElem xy = monomial(zq, 1, 1);
  RingElem check =
      elem_add(elem_mul(alpha, elem_sub(xy, one)), elem_mul(beta, lam));
  if (!elem_eq(check, one))
    fail(Errc::BadInput, "mp_alpha: closed-form identity failed to verify");
  MpAlpha out;
  out.t = t;
  out.residue = residue;
  out.alpha = alpha;
  out.beta = beta;
  return out;
}

std::pair<RingElem, RingElem> ideal_generator_pair(const FamilyPresentation& p) {
  RingElem lam = lambda_of(p);
  UnitEquationSolution s = solve_unit_equation(lam, p.n);
  if (!s.found)
    fail(Errc::NotRegular, "unit equation unsolvable: presentation is not regular");
  RingPtr zq = lam.ring;
  RingElem one = ring_one(zq);
  RingElem xy = monomial(zq, 1, 1);
  RingElem g1 = elem_add(one, elem_mul(elem_sub(one, xy), s.alpha));
  RingElem g2 = elem_mul(lam, s.alpha);
  return {g1, g2};
}

ChainBoundaries chain_boundaries(const FamilyPresentation& p) {
  validate(p);
  RingPtr zq = ring_zq4n(p.n);
  Word r1 = first_relator(p.n);
  Word r2 = relator(p);
  ChainBoundaries cb;
  cb.d2[0][0] = fox_derivative(zq, r1, 'x');
  cb.d2[0][1] = fox_derivative(zq, r1, 'y');
  cb.d2[1][0] = fox_derivative(zq, r2, 'x');
  cb.d2[1][1] = fox_derivative(zq, r2, 'y');
  cb.d1[0] = elem_sub(monomial(zq, 1), ring_one(zq));
  cb.d1[1] = elem_sub(monomial(zq, 0, 1), ring_one(zq));
  for (int i = 0; i < 2; ++i) {
    RingElem comp = elem_add(elem_mul(cb.d2[i][0], cb.d1[0]),
                             elem_mul(cb.d2[i][1], cb.d1[1]));
    if (!elem_is_zero(comp))
      fail(Errc::BadInput, "chain boundaries do not compose to zero (unexpected)");
  }
  return cb;
}

F2C3 f2c3_obstruction(const FamilyPresentation& p) {
  if (p.n % 3 != 0) fail(Errc::BadInput, "f2c3_obstruction needs 3 | n");
  RingElem lam = lambda_of(p);
  int lred = 0, lbarred = 0;  // elements of F_2 C_3 as 3-bit masks
  for (int i = 0; i < 2 * p.n; ++i) {
    if (lam.c[i] % 2 != 0) {
      lred ^= 1 << (i % 3);
      lbarred ^= 1 << ((3 - i % 3) % 3);
    }
  }
  auto mulf2c3 = [](int u, int v) {
    int out = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if ((u >> i & 1) && (v >> j & 1)) out ^= 1 << ((i + j) % 3);
    return out;
  };
  for (int d = 0; d < 8; ++d)
    for (int g = 0; g < 8; ++g)
      if ((mulf2c3(d, lred) ^ mulf2c3(g, lbarred)) == 1) return F2C3::Pass;
  return F2C3::Obstructed;
}

}  // namespace qlat
