#include "qlat/presentations.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "qlat/error.hpp"

namespace qlat {

FamilyPresentation std_presentation(int n) { return {n, {}, {}}; }

FamilyPresentation e_presentation(int n, long r) {
  // r = 1 would need the forbidden zero exponent; its relator freely reduces
  // to the standard one, so return the k = 0 presentation.
  if (r == 1) return std_presentation(n);
  return {n, {2}, {1 - r}};
}

int height(const FamilyPresentation& p) { return static_cast<int>(p.ns.size()); }

long tail_n(const FamilyPresentation& p) {
  return 1 - std::accumulate(p.ns.begin(), p.ns.end(), 0L);
}

long tail_m(const FamilyPresentation& p) {
  return 1 - std::accumulate(p.ms.begin(), p.ms.end(), 0L);
}

void validate(const FamilyPresentation& p) {
  if (p.n < 2) fail(Errc::BadInput, "presentation needs n >= 2");
  if (p.ns.size() != p.ms.size())
    fail(Errc::BadInput, "exponent sequences must have equal length");
  for (long v : p.ns)
    if (v == 0) fail(Errc::ZeroExponent, "zero entry in ns");
  for (long v : p.ms)
    if (v == 0) fail(Errc::ZeroExponent, "zero entry in ms");
}

std::string describe(const FamilyPresentation& p) {
  if (p.ns.empty()) return "P_" + std::to_string(p.n) + "^std";
  std::string s = "P_" + std::to_string(p.n) + "(";
  for (size_t i = 0; i < p.ns.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p.ns[i]);
  }
  s += ";";
  for (size_t i = 0; i < p.ms.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p.ms[i]);
  }
  s += ")";
  return s;
}

Word family_word_ab(const FamilyPresentation& p) {
  validate(p);
  Word w;
  for (size_t i = 0; i < p.ns.size(); ++i) {
    w.push_back({'a', p.ns[i]});
    w.push_back({'b', p.ms[i]});
  }
  w.push_back({'a', tail_n(p)});
  w.push_back({'b', tail_m(p)});
  return reduce_word(w);
}

Word relator(const FamilyPresentation& p) {
  Word img_a = {{'x', 1}};
  Word img_b = {{'y', 1}, {'x', 1}, {'y', -1}};
  return substitute(family_word_ab(p), img_a, img_b);
}

Word first_relator(int n) { return reduce_word({{'x', n}, {'y', -2}}); }

namespace {

long mod_pos(long v, long m) {
  long r = v % m;
  return r < 0 ? r + m : r;
}

}  // namespace

FamilyPresentation apply_move(const FamilyPresentation& p, MoveType move,
                              const std::vector<long>* repl_ns,
                              const std::vector<long>* repl_ms) {
  validate(p);
  int k = height(p);
  switch (move) {
    case MoveType::I: {
      if (!repl_ns || !repl_ms) fail(Errc::BadInput, "move I needs replacement exponents");
      if (repl_ns->size() != p.ns.size() || repl_ms->size() != p.ms.size())
        fail(Errc::BadInput, "move I replacement length mismatch");
      for (int i = 0; i < k; ++i) {
        if (mod_pos((*repl_ns)[i] - p.ns[i], p.n) != 0 ||
            mod_pos((*repl_ms)[i] - p.ms[i], p.n) != 0)
          fail(Errc::BadInput, "move I replacement not congruent mod n");
        if ((*repl_ns)[i] == 0 || (*repl_ms)[i] == 0)
          fail(Errc::ZeroExponent, "move I replacement creates a zero exponent");
      }
      return {p.n, *repl_ns, *repl_ms};
    }
    case MoveType::II: {
      if (k == 0) return p;
      FamilyPresentation q{p.n, {}, {}};
      q.ns.assign(p.ns.begin() + 1, p.ns.end());
      q.ns.push_back(tail_n(p));
      q.ms.assign(p.ms.begin() + 1, p.ms.end());
      q.ms.push_back(tail_m(p));
      validate(q);
      return q;
    }
    case MoveType::III: {
      if (k == 0) return p;
      FamilyPresentation q{p.n, {}, {}};
      q.ns = p.ms;
      q.ms.assign(p.ns.begin() + 1, p.ns.end());
      q.ms.push_back(tail_n(p));
      validate(q);
      return q;
    }
  }
  fail(Errc::BadInput, "unknown move");
}

FamilyPresentation height_one_normal_form(const FamilyPresentation& p) {
  validate(p);
  if (height(p) == 0) return p;
  if (height(p) != 1) fail(Errc::BadInput, "height_one_normal_form needs k <= 1");
  long n = p.n;
  long box = (n + 1) / 2;  // ceil(n/2)
  auto candidates = [&](long v) {
    std::vector<long> c;
    long r = mod_pos(v, n);
    long rc = mod_pos(1 - v, n);
    if (r >= 1 && r <= box) c.push_back(r);
    if (rc >= 1 && rc <= box && rc != r) c.push_back(rc);
    return c;
  };
  std::vector<long> as = candidates(p.ns[0]);
  std::vector<long> bs = candidates(p.ms[0]);
  if (as.empty() || bs.empty())
    fail(Errc::BadInput, "height-one orbit has no in-box representative");
  // Reachable in-box pairs: {a} x {b} together with the swapped pairs.
  long bn = 0, bm = 0;
  bool have = false;
  auto consider = [&](long a, long b) {
    if (!have || a < bn || (a == bn && b < bm)) {
      bn = a;
      bm = b;
      have = true;
    }
  };
  for (long a : as)
    for (long b : bs) {
      consider(a, b);
      consider(b, a);
    }
  if (bn == 1 || bm == 1) return std_presentation(p.n);
  return {p.n, {bn}, {bm}};
}

FamilyPresentation even_palindrome(int n, const std::vector<long>& ns) {
  if (n < 2) fail(Errc::BadInput, "even_palindrome needs n >= 2");
  for (long v : ns) {
    if (v == 0) fail(Errc::ZeroExponent, "even_palindrome entries must be nonzero");
    if (v % 2 != 0) fail(Errc::BadInput, "even_palindrome entries must be even");
  }
  FamilyPresentation p{n, ns, {}};
  p.ms.assign(ns.rbegin(), ns.rend());
  for (long& v : p.ms) v = -v;
  return p;
}

namespace {

std::vector<Int> abelianization_of_word(int n, const Word& rel) {
  IMat m(2, 2);
  m.at(0, 0) = n;
  m.at(0, 1) = -2;
  m.at(1, 0) = exp_sum(rel, 'x');
  m.at(1, 1) = exp_sum(rel, 'y');
  std::vector<Int> f = smith_invariant_factors(m);
  std::vector<Int> out;
  for (const Int& d : f)
    if (d != 1) out.push_back(d);
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Int> abelianization(const FamilyPresentation& p) {
  return abelianization_of_word(p.n, relator(p));
}

std::vector<Int> abelianization(const RawPresentation& p) {
  return abelianization_of_word(p.n, p.second_relator);
}

FamilyPresentation regular_normal_form(const RawPresentation& p) {
  const long n = p.n;
  if (n < 2) fail(Errc::BadInput, "regular_normal_form needs n >= 2");

  // Step 1: eliminate y-powers via y^{2m} = x^{nm}, y^{2m+1} = x^{nm} y,
  // leaving an alternating word x^{a_1} y x^{a_2} y ... x^{a_k} y
  // (cyclically; the trailing x-block wraps to the front).
  std::vector<long> xs;
  long cur = 0;
  for (const Letter& l : reduce_word(p.second_relator)) {
    if (l.gen == 'x') {
      cur += l.exp;
    } else if (l.gen == 'y') {
      long e = l.exp;
      long m = e >= 0 ? e / 2 : -((-e + 1) / 2);  // floor(e/2)
      long rem = e - 2 * m;                       // 0 or 1
      cur += n * m;
      if (rem == 1) {
        xs.push_back(cur);
        cur = 0;
      }
    } else {
      fail(Errc::BadInput, "relator must be a word over x, y");
    }
  }
  if (xs.empty())
    fail(Errc::NotReducible, "relator reduces to a power of x");
  xs[0] += cur;

  // Step 2: group the y's in pairs; extracting y^2 = x^n from each pair
  // contributes x^{n * (#pairs)} to the leading exponent.
  if (xs.size() % 2 != 0)
    fail(Errc::NotReducible, "odd number of y letters after rewriting");
  size_t np = xs.size() / 2;
  std::vector<std::pair<long, long>> pr(np);
  for (size_t i = 0; i < np; ++i) pr[i] = {xs[2 * i], xs[2 * i + 1]};
  pr[0].first += n * static_cast<long>(np);

  // Step 3: balance the two exponent ladders (valid when congruent mod 2n).
  auto sum_first = [&] {
    long s = 0;
    for (auto& q : pr) s += q.first;
    return s;
  };
  auto sum_second = [&] {
    long s = 0;
    for (auto& q : pr) s += q.second;
    return s;
  };
  long diff = sum_first() - sum_second();
  if (mod_pos(diff, 2 * n) != 0)
    fail(Errc::NotReducible, "exponent ladders differ mod 2n; relator not trivial in Q_4n");
  long r = diff / (2 * n);
  pr[0].first -= n * r;
  pr[0].second += n * r;

  // Step 4: the common sum must be +-1; invert if it is -1.
  long t = sum_first();
  if (t != 1 && t != -1)
    fail(Errc::NotReducible, "abelianized relator incompatible with Q_4n");
  if (t == -1) {
    std::vector<std::pair<long, long>> inv;
    inv.reserve(np);
    inv.push_back({-pr[0].first, -pr[np - 1].second});
    for (size_t i = np - 1; i >= 1; --i)
      inv.push_back({-pr[i].first, -pr[i - 1].second});
    pr = std::move(inv);
  }

  // Step 5: reduce listed exponents into (-ceil(n/2), ceil(n/2)] with the
  // last pair absorbing the compensation, and strip zero exponents by
  // cyclic merging.  Repeat to a fixed point.
  long box = (n + 1) / 2;
  auto window = [&](long v) {
    long w = mod_pos(v, n);
    return w <= box ? w : w - n;
  };
  for (;;) {
    bool changed = false;
    np = pr.size();
    for (size_t i = 0; i + 1 < np; ++i) {
      long w = window(pr[i].first);
      if (w != pr[i].first) {
        pr[np - 1].first += pr[i].first - w;
        pr[i].first = w;
        changed = true;
      }
      w = window(pr[i].second);
      if (w != pr[i].second) {
        pr[np - 1].second += pr[i].second - w;
        pr[i].second = w;
        changed = true;
      }
    }
    bool stripped = false;
    for (size_t i = 0; i < pr.size(); ++i) {
      if (pr.size() == 1) break;
      size_t np2 = pr.size();
      if (pr[i].first == 0) {
        pr[(i + np2 - 1) % np2].second += pr[i].second;
        pr.erase(pr.begin() + static_cast<long>(i));
        stripped = true;
        break;
      }
      if (pr[i].second == 0) {
        size_t j = (i + 1) % np2;
        if (j == 0) {
          pr[0].first += pr[i].first;
          pr.erase(pr.begin() + static_cast<long>(i));
        } else {
          pr[i].first += pr[j].first;
          pr[i].second = pr[j].second;
          pr.erase(pr.begin() + static_cast<long>(j));
        }
        stripped = true;
        break;
      }
    }
    if (stripped) {
      changed = true;
      continue;
    }
    if (!changed) break;
  }

  if (pr.size() == 1) {
    if (pr[0].first == 0 || pr[0].second == 0)
      fail(Errc::NotReducible, "relator collapses to a power of one generator");
    // Sums are 1, so the lone pair is (1, 1) = the standard relator ab.
    assert(pr[0].first == 1 && pr[0].second == 1);
    return std_presentation(p.n);
  }

  FamilyPresentation out{p.n, {}, {}};
  for (size_t i = 0; i + 1 < pr.size(); ++i) {
    out.ns.push_back(pr[i].first);
    out.ms.push_back(pr[i].second);
  }
  validate(out);
  assert(tail_n(out) == pr.back().first && tail_m(out) == pr.back().second);
  return out;
}

}  // namespace qlat
