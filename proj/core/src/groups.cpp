#include "qlat/groups.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>

#include "qlat/error.hpp"

namespace qlat {

namespace {

int mod2n(long v, int n) {
  long m = 2L * n;
  long r = v % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

}  // namespace

Q4nElement q4n_identity(int n) { return {n, 0, 0}; }

Q4nElement q4n_x(int n, long e) { return {n, mod2n(e, n), 0}; }

Q4nElement q4n_y(int n) { return {n, 0, 1}; }

Q4nElement q4n_mul(const Q4nElement& a, const Q4nElement& b) {
  if (a.n != b.n) fail(Errc::BadInput, "q4n_mul: mixed groups");
  int n = a.n;
  long i = a.j ? static_cast<long>(a.i) - b.i : static_cast<long>(a.i) + b.i;
  if (a.j && b.j) i += n;  // y^2 = x^n
  return {n, mod2n(i, n), a.j ^ b.j};
}

Q4nElement q4n_inv(const Q4nElement& a) {
  if (a.j) return {a.n, mod2n(a.n + a.i, a.n), 1};
  return {a.n, mod2n(-static_cast<long>(a.i), a.n), 0};
}

Q4nElement q4n_pow(const Q4nElement& a, long e) {
  Q4nElement base = e < 0 ? q4n_inv(a) : a;
  unsigned long k = e < 0 ? static_cast<unsigned long>(-(e + 1)) + 1 : static_cast<unsigned long>(e);
  Q4nElement acc = q4n_identity(a.n);
  while (k) {
    if (k & 1) acc = q4n_mul(acc, base);
    base = q4n_mul(base, base);
    k >>= 1;
  }
  return acc;
}

int q4n_order(const Q4nElement& a) {
  if (a.j) return 4;
  if (a.i == 0) return 1;
  long m = 2L * a.n;
  return static_cast<int>(m / std::gcd(static_cast<long>(a.i), m));
}

Q4nElement evaluate(const Word& w, int n) {
  Q4nElement g = q4n_identity(n);
  for (const Letter& l : w) {
    Q4nElement base;
    if (l.gen == 'x')
      base = q4n_x(n);
    else if (l.gen == 'y')
      base = q4n_y(n);
    else
      fail(Errc::BadInput, "evaluate: word must be over x, y");
    g = q4n_mul(g, q4n_pow(base, l.exp));
  }
  return g;
}

Q4nElement apply_aut(const Q4nAutomorphism& t, const Q4nElement& g) {
  if (t.n != g.n) fail(Errc::BadInput, "apply_aut: mixed groups");
  long i = static_cast<long>(t.a) * g.i;
  if (g.j) i += t.b;
  return {t.n, mod2n(i, t.n), g.j};
}

// compose(s, t) applies t first:  apply_aut(compose(s,t), g) ==
// apply_aut(s, apply_aut(t, g)).
Q4nAutomorphism compose(const Q4nAutomorphism& s, const Q4nAutomorphism& t) {
  if (s.n != t.n) fail(Errc::BadInput, "compose: mixed groups");
  long a = static_cast<long>(s.a) * t.a;
  long b = static_cast<long>(s.a) * t.b + s.b;
  return {s.n, mod2n(a, s.n), mod2n(b, s.n)};
}

Q4nAutomorphism inverse(const Q4nAutomorphism& t) {
  long m = 2L * t.n;
  long ainv = -1;
  for (long c = 1; c < m; ++c)
    if (mod2n(c * t.a, t.n) == 1) {
      ainv = c;
      break;
    }
  if (ainv < 0) fail(Errc::BadInput, "inverse: a is not a unit mod 2n");
  return {t.n, static_cast<int>(ainv), mod2n(-ainv * t.b, t.n)};
}

std::vector<Q4nAutomorphism> q4n_automorphisms(int n) {
  if (n < 3) fail(Errc::UnsupportedN, "automorphism group supported only for n >= 3");
  std::vector<Q4nAutomorphism> out;
  long m = 2L * n;
  for (long a = 1; a < m; ++a) {
    if (std::gcd(a, m) != 1) continue;
    for (long b = 0; b < m; ++b) out.push_back({n, static_cast<int>(a), static_cast<int>(b)});
  }
  return out;
}

std::vector<Q4nAutomorphism> q4n_out_representatives(int n) {
  if (n < 3) fail(Errc::UnsupportedN, "automorphism group supported only for n >= 3");
  // theta_{a,b} ~ theta_{a', b'} in Out iff a' = +-a and b' = b (mod 2),
  // since Inn = {theta_{e, 2c} : e = +-1}.
  std::vector<Q4nAutomorphism> out;
  long m = 2L * n;
  for (long a = 1; a < n; ++a) {
    if (std::gcd(a, m) != 1) continue;
    out.push_back({n, static_cast<int>(a), 0});
    out.push_back({n, static_cast<int>(a), 1});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Todd-Coxeter
// ---------------------------------------------------------------------------

namespace {

// Column encoding: 0 = x, 1 = x^-1, 2 = y, 3 = y^-1.
std::vector<int> to_columns(const Word& w) {
  std::vector<int> cols;
  for (const Letter& l : reduce_word(w)) {
    int base;
    if (l.gen == 'x')
      base = 0;
    else if (l.gen == 'y')
      base = 2;
    else
      fail(Errc::BadInput, "todd_coxeter: word must be over x, y");
    int col = l.exp > 0 ? base : base + 1;
    long count = l.exp > 0 ? l.exp : -l.exp;
    for (long c = 0; c < count; ++c) cols.push_back(col);
  }
  return cols;
}

struct Enumerator {
  long cap;
  std::vector<std::array<long, 4>> t;
  std::vector<long> rep;
  std::vector<long> queue;
  size_t qhead = 0;
  long live = 1;
  bool overflow = false;

  explicit Enumerator(long cap_) : cap(cap_) {
    t.push_back({-1, -1, -1, -1});
    rep.push_back(0);
  }

  static int ic(int g) { return g ^ 1; }

  bool alive(long a) const { return rep[a] == a; }

  long find(long a) {
    while (rep[a] != a) {
      rep[a] = rep[rep[a]];
      a = rep[a];
    }
    return a;
  }

  long define(long a, int g) {
    if (static_cast<long>(t.size()) >= cap) {
      overflow = true;
      return -1;
    }
    long b = static_cast<long>(t.size());
    t.push_back({-1, -1, -1, -1});
    rep.push_back(b);
    t[a][g] = b;
    t[b][ic(g)] = a;
    ++live;
    return b;
  }

  void merge(long a, long b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    rep[b] = a;
    --live;
    queue.push_back(b);
  }

  void process_coincidences() {
    while (qhead < queue.size()) {
      long y = queue[qhead++];
      for (int g = 0; g < 4; ++g) {
        long d = t[y][g];
        if (d < 0) continue;
        if (t[d][ic(g)] == y) t[d][ic(g)] = -1;
        long mu = find(y), nu = find(d);
        if (t[mu][g] >= 0)
          merge(nu, t[mu][g]);
        else if (t[nu][ic(g)] >= 0)
          merge(mu, t[nu][ic(g)]);
        else {
          t[mu][g] = nu;
          t[nu][ic(g)] = mu;
        }
      }
    }
  }

  // Trace w from coset a back to a, defining cosets across gaps (HLT).
  // Returns false only on table overflow.
  bool scan_and_fill(long a, const std::vector<int>& w) {
    long f = find(a), b = f;
    long i = 0, j = static_cast<long>(w.size()) - 1;
    for (;;) {
      while (i <= j) {
        long nxt = t[f][w[i]];
        if (nxt < 0) break;
        f = find(nxt);
        ++i;
      }
      if (i > j) {
        if (f != b) {
          merge(f, b);
          process_coincidences();
        }
        return true;
      }
      while (j >= i) {
        long prv = t[b][ic(w[j])];
        if (prv < 0) break;
        b = find(prv);
        --j;
      }
      if (j < i) {
        merge(f, b);
        process_coincidences();
        return true;
      }
      if (j == i) {
        t[f][w[i]] = b;
        if (t[b][ic(w[i])] < 0)
          t[b][ic(w[i])] = f;
        else if (find(t[b][ic(w[i])]) != f) {
          merge(t[b][ic(w[i])], f);
          process_coincidences();
        }
        return true;
      }
      long nc = define(f, w[i]);
      if (nc < 0) return false;
      f = nc;
      ++i;
    }
  }
};

}  // namespace

ToddCoxeterResult todd_coxeter(const std::vector<Word>& relators,
                               const std::vector<Word>& subgroup_gens,
                               long max_cosets) {
  if (max_cosets < 1) fail(Errc::BadInput, "todd_coxeter: max_cosets must be positive");
  std::vector<std::vector<int>> rws;
  for (const Word& w : relators) {
    std::vector<int> cols = to_columns(w);
    if (!cols.empty()) rws.push_back(std::move(cols));
  }
  std::vector<std::vector<int>> sws;
  for (const Word& w : subgroup_gens) {
    std::vector<int> cols = to_columns(w);
    if (!cols.empty()) sws.push_back(std::move(cols));
  }
  Enumerator e(max_cosets);
  for (const auto& w : sws)
    if (!e.scan_and_fill(e.find(0), w)) return {false, e.live};
  for (long a = 0; a < static_cast<long>(e.t.size()); ++a) {
    if (!e.alive(a)) continue;
    for (const auto& w : rws) {
      if (!e.scan_and_fill(a, w)) return {false, e.live};
      if (!e.alive(a)) break;
    }
    if (!e.alive(a)) continue;
    for (int g = 0; g < 4; ++g) {
      if (e.t[a][g] < 0 && e.define(a, g) < 0) return {false, e.live};
    }
  }
  return {true, e.live};
}

long default_max_cosets(int n) { return 200L * 4 * n; }

PresentsVerdict presents_q4n(const FamilyPresentation& p) {
  return presents_q4n(p, default_max_cosets(p.n));
}

PresentsVerdict presents_q4n(const FamilyPresentation& p, long max_cosets) {
  validate(p);
  Word second = relator(p);
  ToddCoxeterResult tc =
      todd_coxeter({first_relator(p.n), second}, {}, max_cosets);
  if (!tc.closed) return PresentsVerdict::Unknown;
  if (tc.cosets != 4L * p.n) return PresentsVerdict::No;
  // The natural map x |-> x, y |-> y is onto; with matching order it is an
  // isomorphism provided the relators hold in Q_4n (they always do here).
  if (!(evaluate(second, p.n) == q4n_identity(p.n))) return PresentsVerdict::No;
  return PresentsVerdict::Regular;
}

RawPresentsVerdict presents_q4n(const RawPresentation& p) {
  return presents_q4n(p, default_max_cosets(p.n));
}

RawPresentsVerdict presents_q4n(const RawPresentation& p, long max_cosets) {
  if (p.n < 2) fail(Errc::BadInput, "presents_q4n needs n >= 2");
  Word second = reduce_word(p.second_relator);
  ToddCoxeterResult tc =
      todd_coxeter({first_relator(p.n), second}, {}, max_cosets);
  if (!tc.closed) return RawPresentsVerdict::Unknown;
  if (tc.cosets != 4L * p.n) return RawPresentsVerdict::No;
  if (evaluate(second, p.n) == q4n_identity(p.n)) return RawPresentsVerdict::Regular;
  // Any isomorphism must send (x, y) to a generating pair satisfying
  // x^n y^-2; up to Aut(Q_4n) the only candidate beyond the identity map is
  // x |-> xy, y |-> y, which exists only when n = 2 (mod 4).
  if (p.n % 4 == 2) {
    Word img_x = {{'x', 1}, {'y', 1}};
    Word img_y = {{'y', 1}};
    Word r1 = substitute(first_relator(p.n), img_x, img_y, 'x', 'y');
    Word r2 = substitute(second, img_x, img_y, 'x', 'y');
    if (evaluate(r1, p.n) == q4n_identity(p.n) &&
        evaluate(r2, p.n) == q4n_identity(p.n))
      return RawPresentsVerdict::PresentsNonStandard;
  }
  return RawPresentsVerdict::No;
}

// ---------------------------------------------------------------------------
// Small abstract groups
// ---------------------------------------------------------------------------

bool is_group_table(const SmallGroup& g) {
  int m = g.order;
  if (m < 1 || static_cast<int>(g.mul.size()) != m) return false;
  for (const auto& row : g.mul) {
    if (static_cast<int>(row.size()) != m) return false;
    for (int v : row)
      if (v < 0 || v >= m) return false;
  }
  // Latin square
  for (int a = 0; a < m; ++a) {
    std::vector<char> seen_row(m, 0), seen_col(m, 0);
    for (int b = 0; b < m; ++b) {
      if (seen_row[g.mul[a][b]]++) return false;
      if (seen_col[g.mul[b][a]]++) return false;
    }
  }
  // two-sided identity
  int e = -1;
  for (int c = 0; c < m && e < 0; ++c) {
    bool ok = true;
    for (int a = 0; a < m; ++a)
      if (g.mul[c][a] != a || g.mul[a][c] != a) {
        ok = false;
        break;
      }
    if (ok) e = c;
  }
  if (e < 0) return false;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        if (g.mul[g.mul[a][b]][c] != g.mul[a][g.mul[b][c]]) return false;
  return true;
}

namespace {

int table_identity(const SmallGroup& g) {
  for (int c = 0; c < g.order; ++c) {
    bool ok = true;
    for (int a = 0; a < g.order; ++a)
      if (g.mul[c][a] != a || g.mul[a][c] != a) {
        ok = false;
        break;
      }
    if (ok) return c;
  }
  fail(Errc::BadInput, "multiplication table has no identity");
}

}  // namespace

std::vector<int> element_orders(const SmallGroup& g) {
  int e = table_identity(g);
  std::vector<int> ord(g.order, 0);
  for (int a = 0; a < g.order; ++a) {
    int cur = a, k = 1;
    while (cur != e) {
      cur = g.mul[cur][a];
      ++k;
      if (k > g.order) fail(Errc::BadInput, "not a group table");
    }
    ord[a] = k;
  }
  return ord;
}

namespace {

// Element index inside q4n_table: x^i y^j  <->  j * 2n + i.
int q4n_index(const Q4nElement& g) { return g.j * 2 * g.n + g.i; }

}  // namespace

SmallGroup q4n_table(int n) {
  if (n < 2) fail(Errc::BadInput, "q4n_table needs n >= 2");
  int m = 4 * n;
  SmallGroup g;
  g.order = m;
  g.mul.assign(m, std::vector<int>(m, 0));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Q4nElement u{n, a % (2 * n), a / (2 * n)};
      Q4nElement v{n, b % (2 * n), b / (2 * n)};
      g.mul[a][b] = q4n_index(q4n_mul(u, v));
    }
  return g;
}

namespace {

bool q4n_less(const Q4nElement& a, const Q4nElement& b) {
  if (a.j != b.j) return a.j < b.j;
  return a.i < b.i;
}

}  // namespace

std::vector<std::vector<Q4nElement>> q4n_subgroups(int n) {
  if (n < 2) fail(Errc::BadInput, "q4n_subgroups needs n >= 2");
  std::set<std::vector<std::pair<int, int>>> seen;
  std::vector<std::vector<Q4nElement>> out;
  auto add = [&](std::vector<Q4nElement> elems) {
    std::sort(elems.begin(), elems.end(), q4n_less);
    std::vector<std::pair<int, int>> key;
    for (const auto& e : elems) key.emplace_back(e.j, e.i);
    if (seen.insert(key).second) out.push_back(std::move(elems));
  };
  // Cyclic subgroups of <x>: one per divisor d of 2n.
  for (int d = 1; d <= 2 * n; ++d) {
    if ((2 * n) % d) continue;
    std::vector<Q4nElement> elems;
    for (int k = 0; k * d < 2 * n; ++k) elems.push_back(q4n_x(n, k * d));
    add(std::move(elems));
  }
  // <x^d, x^i y> for d | n: dicyclic of order 4n/d (cyclic C_4 when d = n).
  for (int d = 1; d <= n; ++d) {
    if (n % d) continue;
    for (int i = 0; i < d; ++i) {
      std::vector<Q4nElement> elems;
      for (int k = 0; k * d < 2 * n; ++k) {
        elems.push_back(q4n_x(n, k * d));
        elems.push_back(q4n_mul(q4n_x(n, k * d + i), q4n_y(n)));
      }
      add(std::move(elems));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const std::vector<Q4nElement>& a, const std::vector<Q4nElement>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              for (size_t k = 0; k < a.size(); ++k) {
                if (a[k] == b[k]) continue;
                return q4n_less(a[k], b[k]);
              }
              return false;
            });
  return out;
}

namespace {

SmallGroup table_from_elements(int n, const std::vector<Q4nElement>& elems) {
  std::map<std::pair<int, int>, int> idx;
  for (size_t k = 0; k < elems.size(); ++k) idx[{elems[k].j, elems[k].i}] = static_cast<int>(k);
  SmallGroup g;
  g.order = static_cast<int>(elems.size());
  g.mul.assign(g.order, std::vector<int>(g.order, 0));
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b) {
      Q4nElement p = q4n_mul(elems[a], elems[b]);
      auto it = idx.find({p.j, p.i});
      if (it == idx.end()) fail(Errc::BadInput, "element list is not closed under multiplication");
      g.mul[a][b] = it->second;
    }
  (void)n;
  return g;
}

// Greedy generating sequence: repeatedly adjoin the smallest element outside
// the closure of what we have.
std::vector<int> generating_sequence(const SmallGroup& g, std::vector<char>& in_closure) {
  int e = table_identity(g);
  std::vector<int> gens;
  in_closure.assign(g.order, 0);
  in_closure[e] = 1;
  int covered = 1;
  while (covered < g.order) {
    int pick = -1;
    for (int a = 0; a < g.order; ++a)
      if (!in_closure[a]) {
        pick = a;
        break;
      }
    gens.push_back(pick);
    // close
    std::vector<int> frontier{pick};
    in_closure[pick] = 1;
    ++covered;
    std::vector<int> members;
    for (int a = 0; a < g.order; ++a)
      if (in_closure[a]) members.push_back(a);
    bool grew = true;
    while (grew) {
      grew = false;
      members.clear();
      for (int a = 0; a < g.order; ++a)
        if (in_closure[a]) members.push_back(a);
      for (int a : members)
        for (int b : members) {
          int c = g.mul[a][b];
          if (!in_closure[c]) {
            in_closure[c] = 1;
            ++covered;
            grew = true;
          }
        }
    }
  }
  return gens;
}

struct IsoSearch {
  const SmallGroup& a;
  const SmallGroup& b;
  const std::vector<int>& gens;
  const std::vector<int>& ord_a;
  const std::vector<int>& ord_b;
  std::vector<int> fwd, bwd;  // partial map a -> b and inverse

  bool propagate(std::vector<std::pair<int, int>>& trail) {
    // Close the partial map under multiplication by mapped generators.
    size_t scan = 0;
    std::vector<std::pair<int, int>> known;
    for (int u = 0; u < a.order; ++u)
      if (fwd[u] >= 0) known.emplace_back(u, fwd[u]);
    while (scan < known.size()) {
      auto [u, v] = known[scan++];
      for (int gidx : gens) {
        int h = fwd[gidx];
        if (h < 0) continue;
        int w = a.mul[u][gidx];
        int z = b.mul[v][h];
        if (fwd[w] >= 0) {
          if (fwd[w] != z) return false;
        } else {
          if (bwd[z] >= 0) return false;
          if (ord_a[w] != ord_b[z]) return false;
          fwd[w] = z;
          bwd[z] = w;
          trail.emplace_back(w, z);
          known.emplace_back(w, z);
        }
        // also left-multiplication to pin down more pairs
        int w2 = a.mul[gidx][u];
        int z2 = b.mul[h][v];
        if (fwd[w2] >= 0) {
          if (fwd[w2] != z2) return false;
        } else {
          if (bwd[z2] >= 0) return false;
          if (ord_a[w2] != ord_b[z2]) return false;
          fwd[w2] = z2;
          bwd[z2] = w2;
          trail.emplace_back(w2, z2);
          known.emplace_back(w2, z2);
        }
      }
    }
    return true;
  }

  bool verify_full() {
    for (int u = 0; u < a.order; ++u)
      if (fwd[u] < 0) return false;
    for (int u = 0; u < a.order; ++u)
      for (int v = 0; v < a.order; ++v)
        if (fwd[a.mul[u][v]] != b.mul[fwd[u]][fwd[v]]) return false;
    return true;
  }

  bool dfs(size_t k) {
    if (k == gens.size()) return verify_full();
    int g = gens[k];
    if (fwd[g] >= 0) return dfs(k + 1);
    for (int cand = 0; cand < b.order; ++cand) {
      if (bwd[cand] >= 0) continue;
      if (ord_b[cand] != ord_a[g]) continue;
      std::vector<std::pair<int, int>> trail;
      fwd[g] = cand;
      bwd[cand] = g;
      trail.emplace_back(g, cand);
      if (propagate(trail) && dfs(k + 1)) return true;
      for (auto [u, v] : trail) {
        fwd[u] = -1;
        bwd[v] = -1;
      }
    }
    return false;
  }
};

}  // namespace

bool isomorphic(const SmallGroup& a, const SmallGroup& b) {
  if (a.order != b.order) return false;
  std::vector<int> oa = element_orders(a), ob = element_orders(b);
  std::vector<int> sa = oa, sb = ob;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) return false;
  std::vector<char> closure;
  std::vector<int> gens = generating_sequence(a, closure);
  IsoSearch search{a, b, gens, oa, ob, {}, {}};
  search.fwd.assign(a.order, -1);
  search.bwd.assign(b.order, -1);
  int ea = table_identity(a), eb = table_identity(b);
  search.fwd[ea] = eb;
  search.bwd[eb] = ea;
  return search.dfs(0);
}

bool embeddable_in_q4n(const SmallGroup& h, int n) {
  if (!is_group_table(h)) fail(Errc::BadInput, "embeddable_in_q4n: not a group table");
  if ((4 * n) % h.order != 0) return false;
  for (const auto& elems : q4n_subgroups(n)) {
    if (static_cast<int>(elems.size()) != h.order) continue;
    if (isomorphic(table_from_elements(n, elems), h)) return true;
  }
  return false;
}

}  // namespace qlat
