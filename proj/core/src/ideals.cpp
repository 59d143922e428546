#include "qlat/ideals.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>

#include "qlat/error.hpp"
#include "qlat/lambda.hpp"

namespace qlat {

namespace {

RingElem basis_elem(const RingPtr& r, int j) {
  RingElem e = ring_zero(r);
  e.c[j] = 1;
  return e;
}

std::vector<int> pivot_cols(const IMat& h) {
  std::vector<int> piv(h.rows, -1);
  for (int i = 0; i < h.rows; ++i)
    for (int j = 0; j < h.cols; ++j)
      if (h.at(i, j) != 0) {
        piv[i] = j;
        break;
      }
  return piv;
}

// does c * H = v have a solution; integral = require integer c
bool solves_against(const IMat& h, const std::vector<Int>& num, const Int& den) {
  std::vector<int> piv = pivot_cols(h);
  std::vector<mpq_class> res(num.size());
  for (size_t j = 0; j < num.size(); ++j) {
    mpq_class q(num[j], den);
    q.canonicalize();
    res[j] = q;
  }
  for (int i = 0; i < h.rows; ++i) {
    int p = piv[i];
    if (res[p] == 0) continue;
    mpq_class c = res[p] / h.at(i, p);
    if (c.get_den() != 1) return false;
    for (int j = p; j < h.cols; ++j) res[j] -= c * h.at(i, j);
  }
  for (const mpq_class& q : res)
    if (q != 0) return false;
  return true;
}

bool coordinate_compatible(const RingPtr& order, const RingPtr& other) {
  if (order->tag == other->tag) return true;
  // rational companion: same polynomial modulus and n
  return !order->h.empty() && order->h == other->h && order->tag.n == other->tag.n;
}

}  // namespace

LatticeIdeal from_generators(const RingPtr& order, const std::vector<RingElem>& gens) {
  if (gens.empty()) fail(Errc::ZeroIdeal, "no generators");
  bool any = false;
  for (const RingElem& g : gens) {
    if (!(g.ring->tag == order->tag))
      fail(Errc::TagMismatch, "generator not in the order");
    if (g.den != 1) fail(Errc::BadInput, "generators must be integral");
    if (!elem_is_zero(g)) any = true;
  }
  if (!any) fail(Errc::ZeroIdeal, "all generators are zero");
  int rank = order->rank;
  IMat rows(rank * static_cast<int>(gens.size()), rank);
  int r = 0;
  for (const RingElem& g : gens)
    for (int b = 0; b < rank; ++b, ++r) {
      RingElem prod = elem_mul(basis_elem(order, b), g);
      for (int j = 0; j < rank; ++j) rows.at(r, j) = prod.c[j];
    }
  LatticeIdeal out;
  out.order = order;
  out.basis = hnf_rows(rows);
  out.gens = gens;
  if (out.basis.rows != rank)
    fail(Errc::BadInput, "ideal is not full rank in its order");
  // left-ideal closure check
  for (int i = 0; i < rank; ++i) {
    RingElem v = ring_zero(order);
    for (int j = 0; j < rank; ++j) v.c[j] = out.basis.at(i, j);
    for (int b = 0; b < rank; ++b) {
      RingElem prod = elem_mul(basis_elem(order, b), v);
      if (!solves_against(out.basis, prod.c, 1))
        fail(Errc::BadInput, "left-ideal closure failed (unexpected)");
    }
  }
  return out;
}

bool ideal_equal(const LatticeIdeal& a, const LatticeIdeal& b) {
  return a.order->tag == b.order->tag && a.basis == b.basis;
}

bool contains(const LatticeIdeal& i, const RingElem& a, bool allow_rational) {
  if (!coordinate_compatible(i.order, a.ring))
    fail(Errc::TagMismatch, "element not over the ideal's order");
  if (!allow_rational && a.den != 1)
    fail(Errc::BadInput, "rational element without allow_rational");
  return solves_against(i.basis, a.c, a.den);
}

Int ideal_index(const LatticeIdeal& i) {
  Int d = 1;
  for (int k = 0; k < i.basis.rows; ++k) d *= i.basis.at(k, k);
  return d;
}

LatticeIdeal map_ideal(const RingHom& f, const LatticeIdeal& i) {
  if (!(f.source->tag == i.order->tag))
    fail(Errc::TagMismatch, "map_ideal: source mismatch");
  std::vector<RingElem> imgs;
  imgs.reserve(i.gens.size());
  for (const RingElem& g : i.gens) imgs.push_back(apply(f, g));
  return from_generators(f.target, imgs);
}

LatticeIdeal map_ideal(const RingPtr& target, const LatticeIdeal& i) {
  std::vector<RingElem> imgs;
  imgs.reserve(i.gens.size());
  for (const RingElem& g : i.gens) imgs.push_back(quotient_map(g, target));
  return from_generators(target, imgs);
}

RingElem elem_apply_aut(const Q4nAutomorphism& t, const RingElem& a) {
  const RingPtr& r = a.ring;
  if (r->tag.kind != RingKind::IntegralQ4n || r->tag.n != t.n)
    fail(Errc::TagMismatch, "elem_apply_aut needs a matching ZQ_4n element");
  RingElem out = ring_zero(r);
  out.den = a.den;
  int n = r->tag.n;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2 * n; ++i) {
      const Int& c = a.c[j * 2 * n + i];
      if (c == 0) continue;
      Q4nElement img = apply_aut(t, Q4nElement{n, i, j});
      out.c[img.j * 2 * n + img.i] += c;
    }
  return out;
}

LatticeIdeal twist(const LatticeIdeal& i, const Q4nAutomorphism& theta) {
  Q4nAutomorphism inv = inverse(theta);
  std::vector<RingElem> imgs;
  imgs.reserve(i.gens.size());
  for (const RingElem& g : i.gens) imgs.push_back(elem_apply_aut(inv, g));
  return from_generators(i.order, imgs);
}

bool right_mul_stable(const LatticeIdeal& i, const RingElem& u) {
  if (!coordinate_compatible(i.order, u.ring))
    fail(Errc::TagMismatch, "unit not over the ideal's order");
  for (int k = 0; k < i.basis.rows; ++k) {
    RingElem v = ring_zero(u.ring);
    for (int j = 0; j < i.basis.cols; ++j) v.c[j] = i.basis.at(k, j);
    RingElem prod = elem_mul(v, u);
    if (!solves_against(i.basis, prod.c, prod.den)) return false;
  }
  return true;
}

bool principal_equals(const LatticeIdeal& i, const RingElem& lam) {
  if (elem_is_zero(lam)) return false;
  LatticeIdeal p = from_generators(i.order, {lam});
  return ideal_equal(i, p);
}

LatticeIdeal ideal_right_mul(const LatticeIdeal& i, const RingElem& d) {
  if (!(d.ring->tag == i.order->tag))
    fail(Errc::TagMismatch, "ideal_right_mul: element not in the order");
  IMat rows(i.basis.rows, i.basis.cols);
  for (int k = 0; k < i.basis.rows; ++k) {
    RingElem v = ring_zero(i.order);
    for (int j = 0; j < i.basis.cols; ++j) v.c[j] = i.basis.at(k, j);
    RingElem prod = elem_mul(v, d);
    if (prod.den != 1) fail(Errc::BadInput, "right multiple left the order");
    for (int j = 0; j < i.basis.cols; ++j) rows.at(k, j) = prod.c[j];
  }
  LatticeIdeal out;
  out.order = i.order;
  out.basis = hnf_rows(rows);
  out.gens.clear();
  for (const RingElem& g : i.gens) {
    if (g.ring->tag == i.order->tag) out.gens.push_back(elem_mul(g, d));
  }
  if (out.basis.rows != i.order->rank)
    fail(Errc::BadInput, "right multiple is not full rank");
  return out;
}

LatticeIdeal ideal_sum(const LatticeIdeal& a, const LatticeIdeal& b) {
  if (!(a.order->tag == b.order->tag))
    fail(Errc::TagMismatch, "ideal_sum: different orders");
  LatticeIdeal out;
  out.order = a.order;
  out.basis = hnf_rows(imat_stack(a.basis, b.basis));
  out.gens = a.gens;
  out.gens.insert(out.gens.end(), b.gens.begin(), b.gens.end());
  return out;
}

LatticeIdeal ideal_representative(const FamilyPresentation& p) {
  auto [g1, g2] = ideal_generator_pair(p);
  if (elem_is_zero(g2)) return from_generators(ring_zq4n(p.n), {g1});
  return from_generators(ring_zq4n(p.n), {g1, g2});
}

// ---------------------------------------------------------------------------
// Right orders and short vectors
// ---------------------------------------------------------------------------

namespace {

using Rat = mpq_class;

void require_definite_order(const RingPtr& o) {
  if (o->tag.kind != RingKind::CyclotomicQuaternion || o->rational)
    fail(Errc::BadInput,
         "right-order machinery needs an integral cyclotomic-quaternion order");
}

std::string tag_key(const RingTag& t) {
  std::string k = std::to_string(static_cast<int>(t.kind)) + ":" + std::to_string(t.n);
  for (int d : t.ds) k += "," + std::to_string(d);
  return k + ":" + t.id;
}

// Gram matrix of the regular trace form on the order's monomial basis:
// T[a][b] = Tr_reg(e_a * conj(e_b)).  Positive definite for the definite
// orders handled here (zero divisors of multi-component orders included).
const IMat& regular_trace_gram(const RingPtr& o) {
  static std::map<std::string, IMat> cache;
  std::string key = tag_key(o->tag);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  int n = o->rank;
  std::vector<RingElem> e(n);
  for (int i = 0; i < n; ++i) e[i] = basis_elem(o, i);
  IMat t(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      RingElem z = elem_mul(e[a], involution(e[b]));
      Int tr = 0;
      for (int i = 0; i < n; ++i) tr += elem_mul(z, e[i]).c[i];
      t.at(a, b) = tr;
    }
  return cache.emplace(key, std::move(t)).first->second;
}

// All nonzero integer rows z with z G z^T <= budget (G positive definite),
// by exact LDL^T decomposition and Fincke-Pohst enumeration.
void fp_short_vectors(const std::vector<std::vector<Rat>>& g, const Rat& budget,
                      const std::function<void(const std::vector<Int>&, const Rat&)>& emit) {
  int n = static_cast<int>(g.size());
  std::vector<std::vector<Rat>> gw = g, mu(n, std::vector<Rat>(n, Rat(0)));
  std::vector<Rat> d(n);
  for (int i = 0; i < n; ++i) {
    d[i] = gw[i][i];
    if (d[i] <= 0) fail(Errc::BadInput, "trace form is not positive definite");
    for (int a = i + 1; a < n; ++a) mu[i][a] = gw[i][a] / d[i];
    for (int a = i + 1; a < n; ++a)
      for (int b = i + 1; b < n; ++b) gw[a][b] -= mu[i][a] * gw[i][b];
  }
  std::vector<Int> z(n, 0);
  std::function<void(int, Rat)> rec = [&](int i, Rat left) {
    if (i < 0) {
      bool zero = true;
      for (const Int& v : z) zero = zero && v == 0;
      if (!zero) emit(z, budget - left);
      return;
    }
    Rat c(0);
    for (int a = i + 1; a < n; ++a)
      if (z[a] != 0) c += mu[i][a] * Rat(z[a]);
    Rat nc = -c;
    Int k0;
    mpz_fdiv_q(k0.get_mpz_t(), nc.get_num_mpz_t(), nc.get_den_mpz_t());
    auto step = [&](const Int& k) -> bool {
      Rat t = Rat(k) + c;
      Rat w = d[i] * t * t;
      if (w > left) return false;
      z[i] = k;
      rec(i - 1, left - w);
      return true;
    };
    for (Int k = k0;; k -= 1)
      if (!step(k)) break;
    for (Int k = k0 + 1;; k += 1)
      if (!step(k)) break;
    z[i] = 0;
  };
  rec(n - 1, budget);
}

struct RightOrderData {
  RingPtr companion;  // rational companion ring of the order
  IMat k;             // numerator rows of the O_r basis over the monomial basis
  Int den;            // common denominator
};

RightOrderData right_order_data(const LatticeIdeal& ideal) {
  require_definite_order(ideal.order);
  const RingPtr& o = ideal.order;
  int n = o->rank;
  const IMat& b = ideal.basis;
  Int d = det_bareiss(b);
  if (d < 0) d = -d;
  if (d == 0) fail(Errc::BadInput, "ideal basis is singular");
  // adjugate of b: solve b * adj = d * id column by column
  IMat adj(n, n);
  for (int col = 0; col < n; ++col) {
    std::vector<Int> rhs(n, 0);
    rhs[col] = d;
    LinSolve s = solve_integer(b, rhs);
    if (!s.ok) fail(Errc::BadInput, "adjugate solve failed (unexpected)");
    for (int i = 0; i < n; ++i) adj.at(i, col) = s.x0[i];
  }
  // right-multiplication matrices of the monomial basis
  std::vector<RingElem> e(n);
  for (int i = 0; i < n; ++i) e[i] = basis_elem(o, i);
  // v = u/d stabilizes the lattice iff sum_j u_j (B R_j adj) = 0 mod d^2
  Int d2 = d * d;
  IMat a(n, n * n);
  for (int j = 0; j < n; ++j) {
    IMat rj(n, n);
    for (int i = 0; i < n; ++i) {
      RingElem prod = elem_mul(e[i], e[j]);
      for (int k2 = 0; k2 < n; ++k2) rj.at(i, k2) = prod.c[k2];
    }
    IMat mj = imat_mul(imat_mul(b, rj), adj);
    for (int i = 0; i < n; ++i)
      for (int k2 = 0; k2 < n; ++k2) a.at(j, i * n + k2) = mj.at(i, k2);
  }
  // left kernel of [A; d^2 I] via the right kernel of its transpose
  IMat xt(n * n, n + n * n);
  for (int i = 0; i < n; ++i)
    for (int k2 = 0; k2 < n * n; ++k2) xt.at(k2, i) = a.at(i, k2);
  for (int i = 0; i < n * n; ++i) xt.at(i, n + i) = d2;
  LinSolve ker = solve_integer(xt, std::vector<Int>(n * n, 0));
  if (!ker.ok) fail(Errc::BadInput, "right-order kernel solve failed (unexpected)");
  IMat kraw(ker.kernel.rows, n);
  for (int i = 0; i < ker.kernel.rows; ++i)
    for (int k2 = 0; k2 < n; ++k2) kraw.at(i, k2) = ker.kernel.at(i, k2);
  RightOrderData rd;
  rd.companion = ring_cyclotomic(o->tag.ds, o->tag.n, true);
  rd.k = hnf_rows(kraw);
  rd.den = d;
  if (rd.k.rows != n) fail(Errc::BadInput, "right order is not full rank (unexpected)");
  std::vector<Int> idv(n, 0);
  idv[0] = d;
  if (!in_row_lattice(rd.k, idv))
    fail(Errc::BadInput, "right order does not contain 1 (unexpected)");
  return rd;
}

bool elem_order_less(const RingElem& a, const RingElem& b) {
  if (a.den != b.den) return a.den < b.den;
  for (size_t i = 0; i < a.c.size() && i < b.c.size(); ++i)
    if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
  return false;
}

}  // namespace

std::vector<RingElem> right_order_basis(const LatticeIdeal& i) {
  RightOrderData rd = right_order_data(i);
  int n = i.order->rank;
  std::vector<RingElem> out;
  out.reserve(n);
  for (int r = 0; r < n; ++r) {
    std::vector<Int> c(n);
    for (int k2 = 0; k2 < n; ++k2) c[k2] = rd.k.at(r, k2);
    out.push_back(from_coeffs(rd.companion, c, rd.den));
  }
  return out;
}

std::vector<RingElem> right_order_norm_one_units(const LatticeIdeal& i) {
  RightOrderData rd = right_order_data(i);
  const RingPtr& o = i.order;
  int n = o->rank;
  const IMat& t = regular_trace_gram(o);
  Int den2 = rd.den * rd.den;
  std::vector<std::vector<Rat>> g(n, std::vector<Rat>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Int s = 0;
      for (int i2 = 0; i2 < n; ++i2)
        for (int k2 = 0; k2 < n; ++k2) s += rd.k.at(a, i2) * t.at(i2, k2) * rd.k.at(b, k2);
      Rat q(s, den2);
      q.canonicalize();
      g[a][b] = q;
    }
  // nonzero vectors of a definite order have regular trace >= rank, with
  // equality exactly on the reduced-norm-1 units
  RingElem one = ring_one(rd.companion);
  std::vector<RingElem> out;
  fp_short_vectors(g, Rat(n), [&](const std::vector<Int>& z, const Rat&) {
    std::vector<Int> u(n, 0);
    for (int a = 0; a < n; ++a) {
      if (z[a] == 0) continue;
      for (int k2 = 0; k2 < n; ++k2) u[k2] += z[a] * rd.k.at(a, k2);
    }
    RingElem v = from_coeffs(rd.companion, u, rd.den);
    if (elem_eq(reduced_norm(v), one)) out.push_back(v);
  });
  std::sort(out.begin(), out.end(), elem_order_less);
  return out;
}

std::optional<RingElem> principal_generator(const LatticeIdeal& i, const Int& max_q) {
  require_definite_order(i.order);
  const RingPtr& o = i.order;
  int n = o->rank;
  const IMat& t = regular_trace_gram(o);
  const IMat& b = i.basis;
  std::vector<std::vector<Rat>> g(n, std::vector<Rat>(n));
  for (int a = 0; a < n; ++a)
    for (int b2 = 0; b2 < n; ++b2) {
      Int s = 0;
      for (int i2 = 0; i2 < n; ++i2)
        for (int k2 = 0; k2 < n; ++k2) s += b.at(a, i2) * t.at(i2, k2) * b.at(b2, k2);
      g[a][b2] = Rat(s);
    }
  // with no explicit cap, widen the search shell geometrically; candidates
  // are always tested in (trace, coordinate) order, so the element returned
  // does not depend on which round first reaches it
  std::vector<Int> caps;
  if (max_q == 0)
    for (int m = 4; m <= 32; m *= 2) caps.push_back(Int(m * n));
  else
    caps.push_back(max_q);
  struct Cand {
    Rat q;
    std::vector<Int> z;
  };
  Rat prev(0);
  for (const Int& cap : caps) {
    std::vector<Cand> cands;
    fp_short_vectors(g, Rat(cap), [&](const std::vector<Int>& z, const Rat& q) {
      if (q <= prev) return;  // tested in an earlier round
      for (const Int& v : z) {  // keep one of {z, -z}
        if (v > 0) {
          cands.push_back({q, z});
          break;
        }
        if (v < 0) break;
      }
    });
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
      if (x.q != y.q) return x.q < y.q;
      return x.z < y.z;
    });
    for (const Cand& c : cands) {
      std::vector<Int> u(n, 0);
      for (int a = 0; a < n; ++a) {
        if (c.z[a] == 0) continue;
        for (int k2 = 0; k2 < n; ++k2) u[k2] += c.z[a] * b.at(a, k2);
      }
      RingElem v = from_coeffs(o, u);
      if (principal_equals(i, v)) return v;
    }
    prev = Rat(cap);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Gamma lattices
// ---------------------------------------------------------------------------

namespace {

RingElem to_gamma(const RingElem& g) {
  if (g.ring->tag.kind == RingKind::MaximalGamma) return g;
  GammaCoordinates gc = gamma_coordinates(g);
  if (!gc.in_gamma)
    fail(Errc::BadInput, "generator is not in Gamma: " + gc.fractional_note);
  return gamma_elem(gc.coords);
}

}  // namespace

LatticeIdeal gamma_ideal(const std::vector<RingElem>& gens) {
  std::vector<RingElem> gg;
  gg.reserve(gens.size());
  for (const RingElem& g : gens) gg.push_back(to_gamma(g));
  return from_generators(ring_gamma(), gg);
}

bool gamma_extend(const LatticeIdeal& i, const RingElem& gamma_alpha,
                  bool check_conductor_sum) {
  if (i.order->tag.kind != RingKind::LambdaHalf || i.order->tag.n != 8)
    fail(Errc::TagMismatch, "gamma_extend needs an ideal over Lambda (n = 8)");
  LatticeIdeal gi = gamma_ideal(i.gens);
  LatticeIdeal pa = from_generators(ring_gamma(), {to_gamma(gamma_alpha)});
  if (!ideal_equal(gi, pa)) return false;
  if (check_conductor_sum) {
    // I + tau*Gamma = Lambda, computed in Lambda coordinates (tau*Gamma is
    // contained in Lambda).
    RingPtr r16 = ring_cyclotomic({16}, 8, true);
    RingElem tau = elem_add(monomial(r16, 1), monomial(r16, -1));
    IMat rows(16 + 16, 16);
    for (int k = 0; k < 16; ++k)
      for (int j = 0; j < 16; ++j) rows.at(k, j) = i.basis.at(k, j);
    for (int u = 0; u < 16; ++u) {
      std::vector<Int> c(16, Int(0));
      c[u] = 1;
      RingElem tg = elem_mul(tau, gamma_to_rational(gamma_elem(c)));
      if (tg.den != 1)
        fail(Errc::BadInput, "tau*Gamma escaped Lambda (unexpected)");
      for (int j = 0; j < 16; ++j) rows.at(16 + u, j) = tg.c[j];
    }
    IMat h = hnf_rows(rows);
    if (h.rows != 16) return false;
    for (int a = 0; a < 16; ++a)
      for (int b = 0; b < 16; ++b)
        if (h.at(a, b) != (a == b ? 1 : 0)) return false;
  }
  return true;
}

}  // namespace qlat
