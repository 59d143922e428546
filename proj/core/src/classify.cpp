#include "qlat/classify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "qlat/error.hpp"
#include "qlat/lambda.hpp"

namespace qlat {

namespace {

// Exact comparison key: (denominator, numerator vector), lexicographic.
using ElemKey = std::pair<Int, std::vector<Int>>;

ElemKey key_of(const RingElem& a) { return {a.den, a.c}; }

bool key_less(const RingElem& a, const RingElem& b) { return key_of(a) < key_of(b); }

void check_same_ring(const RingPtr& r, const RingElem& a, const char* who) {
  if (!a.ring || !(a.ring->tag == r->tag))
    fail(Errc::TagMismatch, std::string(who) + ": element ring mismatch");
}

}  // namespace

std::vector<RingElem> ring_elements(const RingPtr& r, size_t cap) {
  if (!r || r->modulus <= 0)
    fail(Errc::BadInput, "ring_elements: finite ring required");
  const long m = r->modulus;
  size_t count = 1;
  for (int i = 0; i < r->rank; ++i) {
    count *= static_cast<size_t>(m);
    if (count > cap)
      fail(Errc::TooLarge, "ring_elements: |R| exceeds cap " + std::to_string(cap));
  }
  std::vector<RingElem> out;
  out.reserve(count);
  std::vector<long> dig(r->rank, 0);
  while (true) {
    std::vector<Int> c(r->rank);
    for (int i = 0; i < r->rank; ++i) c[i] = dig[i];
    out.push_back(from_coeffs(r, std::move(c)));
    int p = 0;
    while (p < r->rank && ++dig[p] == m) dig[p++] = 0;
    if (p == r->rank) break;
  }
  return out;
}

std::vector<RingElem> ring_units(const RingPtr& r, size_t cap) {
  std::vector<RingElem> out;
  for (RingElem& e : ring_elements(r, cap))
    if (finite_is_unit(e)) out.push_back(std::move(e));
  return out;
}

std::optional<std::vector<RingElem>> group_closure(const RingPtr& ring,
                                                   const std::vector<RingElem>& gens,
                                                   size_t cap) {
  std::map<ElemKey, int> seen;
  std::vector<RingElem> out;
  auto push = [&](const RingElem& e) {
    ElemKey k = key_of(e);
    if (seen.count(k)) return;
    seen.emplace(std::move(k), static_cast<int>(out.size()));
    out.push_back(e);
  };
  push(ring_one(ring));
  for (const RingElem& g : gens) {
    check_same_ring(ring, g, "group_closure");
    push(g);
  }
  for (size_t head = 0; head < out.size(); ++head) {
    for (const RingElem& g : gens) {
      push(elem_mul(out[head], g));
      if (out.size() > cap) return std::nullopt;
    }
  }
  return out;
}

SmallGroup multiplication_table(const std::vector<RingElem>& elems) {
  if (elems.empty()) fail(Errc::BadInput, "multiplication_table: empty set");
  const RingPtr r = elems.front().ring;
  std::map<ElemKey, int> idx;
  for (size_t i = 0; i < elems.size(); ++i) {
    check_same_ring(r, elems[i], "multiplication_table");
    if (!idx.emplace(key_of(elems[i]), static_cast<int>(i)).second)
      fail(Errc::BadInput, "multiplication_table: duplicate element");
  }
  if (!idx.count(key_of(ring_one(r))))
    fail(Errc::BadInput, "multiplication_table: set has no identity");
  SmallGroup g;
  g.order = static_cast<int>(elems.size());
  g.mul.assign(g.order, std::vector<int>(g.order, -1));
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b) {
      auto it = idx.find(key_of(elem_mul(elems[a], elems[b])));
      if (it == idx.end())
        fail(Errc::BadInput, "multiplication_table: set not closed under products");
      g.mul[a][b] = it->second;
    }
  return g;
}

int DoubleCosetSpace::unit_index(const RingElem& u) const {
  check_same_ring(ring, u, "unit_index");
  for (size_t i = 0; i < units.size(); ++i)
    if (elem_eq(units[i], u)) return static_cast<int>(i);
  return -1;
}

int DoubleCosetSpace::class_of_element(const RingElem& u) const {
  int i = unit_index(u);
  if (i < 0)
    fail(Errc::NonUnitGenerator, "class_of_element: not a unit: " + format_elem(u));
  return class_of[i];
}

std::string DoubleCosetSpace::rep_string(int cls) const {
  if (cls < 0 || cls >= classes()) fail(Errc::BadInput, "rep_string: bad class index");
  return format_elem(units[reps[cls]]);
}

DoubleCosetSpace double_cosets(const RingPtr& r,
                               const std::vector<RingElem>& left_gens,
                               const std::vector<RingElem>& right_gens) {
  DoubleCosetSpace sp;
  sp.ring = r;
  sp.units = ring_units(r);
  std::map<ElemKey, int> uidx;
  for (size_t i = 0; i < sp.units.size(); ++i)
    uidx.emplace(key_of(sp.units[i]), static_cast<int>(i));
  auto check_gens = [&](const std::vector<RingElem>& gens) {
    for (const RingElem& g : gens) {
      check_same_ring(r, g, "double_cosets");
      if (!uidx.count(key_of(g)))
        fail(Errc::NonUnitGenerator,
             "double_cosets: generator is not a unit: " + format_elem(g));
    }
  };
  check_gens(left_gens);
  check_gens(right_gens);
  auto close = [&](const std::vector<RingElem>& gens) {
    auto cl = group_closure(r, gens, sp.units.size() + 1);
    if (!cl) fail(Errc::ClosureTooLarge, "double_cosets: subgroup closure escaped the unit group");
    std::sort(cl->begin(), cl->end(), key_less);
    return *cl;
  };
  sp.left_subgroup = close(left_gens);
  sp.right_subgroup = close(right_gens);

  sp.class_of.assign(sp.units.size(), -1);
  std::vector<int> reps;
  for (size_t s = 0; s < sp.units.size(); ++s) {
    if (sp.class_of[s] >= 0) continue;
    const int cls = static_cast<int>(reps.size());
    std::vector<int> stack{static_cast<int>(s)};
    sp.class_of[s] = cls;
    int best = static_cast<int>(s);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (key_less(sp.units[v], sp.units[best])) best = v;
      auto visit = [&](const RingElem& w) {
        auto it = uidx.find(key_of(w));
        if (it == uidx.end())
          fail(Errc::NonUnitGenerator, "double_cosets: orbit left the unit group");
        if (sp.class_of[it->second] < 0) {
          sp.class_of[it->second] = cls;
          stack.push_back(it->second);
        }
      };
      for (const RingElem& g : left_gens) visit(elem_mul(g, sp.units[v]));
      for (const RingElem& g : right_gens) visit(elem_mul(sp.units[v], g));
    }
    reps.push_back(best);
  }
  // canonical class order: ascending representative key
  std::vector<int> order(reps.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return key_less(sp.units[reps[a]], sp.units[reps[b]]);
  });
  std::vector<int> rank(order.size());
  for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  sp.reps.resize(reps.size());
  for (size_t i = 0; i < reps.size(); ++i) sp.reps[rank[i]] = reps[i];
  for (int& c : sp.class_of) c = rank[c];
  return sp;
}

LabelResult milnor_label(const MilnorSquare& sq, const LatticeIdeal& I,
                         const RingElem& lam1, const RingElem& lam2) {
  check_same_ring(sq.corner1, lam1, "milnor_label");
  check_same_ring(sq.corner2, lam2, "milnor_label");
  if (!I.order || !(I.order->tag == sq.top->tag))
    fail(Errc::TagMismatch, "milnor_label: ideal is not over the top order");
  LatticeIdeal i1 = map_ideal(sq.corner1, I);
  if (!principal_equals(i1, lam1))
    fail(Errc::HypothesisFailed,
         "milnor_label: i_1(I) != (" + format_elem(lam1) + ")");
  LatticeIdeal i2 = map_ideal(sq.corner2, I);
  if (!principal_equals(i2, lam2))
    fail(Errc::HypothesisFailed,
         "milnor_label: i_2(I) != (" + format_elem(lam2) + ")");
  RingElem u1 = apply(sq.j1, lam1);
  RingElem u2 = apply(sq.j2, lam2);
  if (!finite_is_unit(u1))
    fail(Errc::HypothesisFailed, "milnor_label: j_1(lambda_1) is not a unit");
  if (!finite_is_unit(u2))
    fail(Errc::HypothesisFailed, "milnor_label: j_2(lambda_2) is not a unit");
  LabelResult res;
  res.fiber_unit = elem_mul(u1, finite_inverse(u2));
  res.cls = sq.space.class_of_element(res.fiber_unit);
  res.rep = sq.space.rep_string(res.cls);
  return res;
}

std::vector<std::vector<int>> aut_action_on_labels(const DoubleCosetSpace& space,
                                                   const std::vector<RingHom>& gens) {
  const size_t nu = space.units.size();
  std::map<ElemKey, int> uidx;
  for (size_t i = 0; i < nu; ++i) uidx.emplace(key_of(space.units[i]), static_cast<int>(i));
  std::set<ElemKey> lset, rset;
  for (const RingElem& e : space.left_subgroup) lset.insert(key_of(e));
  for (const RingElem& e : space.right_subgroup) rset.insert(key_of(e));

  const int ncls = space.classes();
  std::vector<std::vector<int>> cmaps;
  for (const RingHom& f : gens) {
    if (!f.source || !f.target || !(f.source->tag == space.ring->tag) ||
        !(f.target->tag == space.ring->tag))
      fail(Errc::ActionNotWellDefined,
           "aut_action_on_labels: generator is not an endomorphism of the fiber");
    std::vector<int> perm(nu);
    std::vector<char> hit(nu, 0);
    for (size_t i = 0; i < nu; ++i) {
      auto it = uidx.find(key_of(apply(f, space.units[i])));
      if (it == uidx.end())
        fail(Errc::ActionNotWellDefined,
             "aut_action_on_labels: image of a unit is not a unit");
      if (hit[it->second])
        fail(Errc::ActionNotWellDefined, "aut_action_on_labels: unit map not injective");
      hit[it->second] = 1;
      perm[i] = it->second;
    }
    for (const RingElem& l : space.left_subgroup)
      if (!lset.count(key_of(apply(f, l))))
        fail(Errc::ActionNotWellDefined,
             "aut_action_on_labels: left subgroup not preserved");
    for (const RingElem& rr : space.right_subgroup)
      if (!rset.count(key_of(apply(f, rr))))
        fail(Errc::ActionNotWellDefined,
             "aut_action_on_labels: right subgroup not preserved");
    std::vector<int> cmap(ncls, -1);
    for (size_t i = 0; i < nu; ++i) {
      int a = space.class_of[i], b = space.class_of[perm[i]];
      if (cmap[a] < 0)
        cmap[a] = b;
      else if (cmap[a] != b)
        fail(Errc::ActionNotWellDefined,
             "aut_action_on_labels: induced class map not well defined");
    }
    cmaps.push_back(std::move(cmap));
  }
  // orbits of the generated permutation group (generators have finite order,
  // so forward closure suffices)
  std::vector<int> comp(ncls, -1);
  std::vector<std::vector<int>> orbits;
  for (int c = 0; c < ncls; ++c) {
    if (comp[c] >= 0) continue;
    std::vector<int> orb{c}, stack{c};
    comp[c] = static_cast<int>(orbits.size());
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const auto& cmap : cmaps) {
        int w = cmap[v];
        if (comp[w] < 0) {
          comp[w] = comp[c];
          orb.push_back(w);
          stack.push_back(w);
        }
      }
    }
    std::sort(orb.begin(), orb.end());
    orbits.push_back(std::move(orb));
  }
  return orbits;
}

std::string freeness_name(Freeness f) {
  switch (f) {
    case Freeness::Free: return "Free";
    case Freeness::NonFree: return "NonFree";
    case Freeness::StablyFreeUnresolved: return "StablyFreeUnresolved";
  }
  return "?";
}

std::string cert_method_name(CertMethod m) {
  switch (m) {
    case CertMethod::MilnorLabel: return "MilnorLabel";
    case CertMethod::UnitOrderObstruction: return "UnitOrderObstruction";
    case CertMethod::BHJ: return "BHJ";
    case CertMethod::DirectUnit: return "DirectUnit";
  }
  return "?";
}

namespace {

Freeness freeness_from_name(const std::string& s) {
  if (s == "Free") return Freeness::Free;
  if (s == "NonFree") return Freeness::NonFree;
  if (s == "StablyFreeUnresolved") return Freeness::StablyFreeUnresolved;
  fail(Errc::BadInput, "unknown freeness verdict: " + s);
}

nlohmann::json elems_to_json(const std::vector<RingElem>& es) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RingElem& e : es) arr.push_back(elem_to_json(e));
  return arr;
}

std::vector<RingElem> elems_from_json(const RingPtr& r, const nlohmann::json& arr) {
  std::vector<RingElem> out;
  for (const auto& j : arr) out.push_back(elem_from_json(r, j));
  return out;
}

nlohmann::json strings_of(const std::vector<RingElem>& es) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RingElem& e : es) arr.push_back(format_elem(e));
  return arr;
}

}  // namespace

FreenessCertificate bhj_free(const LatticeIdeal& I, const RingElem& gamma_alpha,
                             const std::vector<RingElem>& gamma_unit_image_gens) {
  const RingPtr gam = ring_gamma();
  if (!gamma_alpha.ring || !(gamma_alpha.ring->tag == gam->tag))
    fail(Errc::BadInput, "bhj_free: alpha must lie in Gamma");
  if (!I.order || I.order->tag.kind != RingKind::LambdaHalf || I.order->tag.n != 8)
    fail(Errc::BadInput, "bhj_free: ideal must be over Lambda(n=8)");
  if (!gamma_extend(I, gamma_alpha, true))
    fail(Errc::HypothesisFailed,
         "bhj_free: Gamma*I = (alpha) with I + tau*Gamma = Lambda failed");

  const RingPtr fiber = ring_m2f2();
  const RingHom psi = gamma_residue_hom();
  const RingPtr r16 = ring_cyclotomic({16}, 8, true);

  // F_2-span of the residues of the Lambda basis: the image of Lambda in
  // Gamma / tau*Gamma, realized inside M_2(F_2).
  std::vector<unsigned> pivots;  // bit i = coordinate i mod 2
  auto insert_span = [&](unsigned v) {
    for (unsigned p : pivots) {
      unsigned low = p & static_cast<unsigned>(-static_cast<int>(p));
      if (v & low) v ^= p;
    }
    if (v) pivots.push_back(v);
  };
  for (int i = 0; i < I.order->deg; ++i)
    for (int j = 0; j < 2; ++j) {
      RingElem rat = quotient_map(monomial(I.order, i, j), r16);
      GammaCoordinates gc = gamma_coordinates(rat);
      if (!gc.in_gamma)
        fail(Errc::BadInput, "bhj_free: Lambda basis element outside Gamma");
      RingElem img = apply(psi, gamma_elem(gc.coords));
      unsigned v = 0;
      for (int k = 0; k < fiber->rank; ++k)
        if (img.c[k] % 2 != 0) v |= 1u << k;
      insert_span(v);
    }
  std::vector<RingElem> left;
  for (unsigned mask = 0; mask < (1u << pivots.size()); ++mask) {
    unsigned v = 0;
    for (size_t t = 0; t < pivots.size(); ++t)
      if (mask & (1u << t)) v ^= pivots[t];
    std::vector<Int> c(fiber->rank, 0);
    for (int k = 0; k < fiber->rank; ++k) c[k] = (v >> k) & 1u;
    RingElem e = from_coeffs(fiber, std::move(c));
    if (finite_is_unit(e)) left.push_back(e);
  }
  std::sort(left.begin(), left.end(), key_less);

  DoubleCosetSpace sp = double_cosets(fiber, left, gamma_unit_image_gens);
  RingElem aimg = apply(psi, gamma_alpha);
  if (!finite_is_unit(aimg))
    fail(Errc::HypothesisFailed, "bhj_free: residue of alpha is not a unit");
  const int cls = sp.class_of_element(aimg);
  const int triv = sp.class_of_element(ring_one(fiber));

  FreenessCertificate cert;
  cert.method = CertMethod::BHJ;
  cert.verdict = cls == triv ? Freeness::Free : Freeness::NonFree;
  nlohmann::json reps = nlohmann::json::array();
  for (int c = 0; c < sp.classes(); ++c) reps.push_back(sp.rep_string(c));
  cert.witness = {
      {"ideal", ideal_to_json(I)},
      {"alpha", elem_to_json(gamma_alpha)},
      {"gamma_unit_image_gens", elems_to_json(gamma_unit_image_gens)},
      {"psi_alpha", elem_to_json(aimg)},
      {"psi_alpha_display", format_elem(aimg)},
      {"left_subgroup", strings_of(sp.left_subgroup)},
      {"right_subgroup", strings_of(sp.right_subgroup)},
      {"class_reps", reps},
      {"alpha_class", cls},
      {"trivial_class", triv},
      {"conductor_sum_checked", true},
  };
  return cert;
}

FreenessCertificate unit_order_certificate(const LatticeIdeal& I,
                                           const std::vector<RingElem>& us, int n) {
  if (us.empty()) fail(Errc::BadInput, "unit_order_certificate: no units given");
  const RingPtr uring = us.front().ring;
  for (const RingElem& u : us) {
    check_same_ring(uring, u, "unit_order_certificate");
    if (!elem_eq(reduced_norm(u), ring_one(uring)))
      fail(Errc::HypothesisFailed,
           "unit_order_certificate: reduced norm of " + format_elem(u) + " is not 1");
    if (!right_mul_stable(I, u))
      fail(Errc::HypothesisFailed,
           "unit_order_certificate: ideal not stable under right multiplication by " +
               format_elem(u));
  }
  auto cl = group_closure(uring, us, 10000);
  if (!cl)
    fail(Errc::HypothesisFailed,
         "unit_order_certificate: generated group exceeds the finiteness cap");
  SmallGroup g = multiplication_table(*cl);
  if (!is_group_table(g))
    fail(Errc::HypothesisFailed, "unit_order_certificate: closure is not a group");
  if (embeddable_in_q4n(g, n))
    fail(Errc::HypothesisFailed,
         "unit_order_certificate: the generated unit group embeds in Q_" +
             std::to_string(4 * n));
  FreenessCertificate cert;
  cert.method = CertMethod::UnitOrderObstruction;
  cert.verdict = Freeness::NonFree;
  nlohmann::json orders = nlohmann::json::array();
  for (int o : element_orders(g)) orders.push_back(o);
  cert.witness = {
      {"n", n},
      {"ideal", ideal_to_json(I)},
      {"unit_ring", ring_to_json(uring)},
      {"units", elems_to_json(us)},
      {"unit_displays", strings_of(us)},
      {"closure_order", g.order},
      {"element_orders", orders},
  };
  return cert;
}

std::optional<FreenessCertificate> derived_unit_certificate(const LatticeIdeal& I,
                                                            int n) {
  std::vector<RingElem> units = right_order_norm_one_units(I);
  if (units.empty()) return std::nullopt;
  const RingPtr uring = units.front().ring;
  RingElem one = ring_one(uring);
  // single units whose cyclic group cannot embed
  for (const RingElem& u : units) {
    if (elem_eq(u, one)) continue;
    auto cl = group_closure(uring, {u}, 10000);
    if (!cl) continue;
    if (embeddable_in_q4n(multiplication_table(*cl), n)) continue;
    return unit_order_certificate(I, {u}, n);
  }
  // pairs of order-3 units generating a non-embeddable group
  std::vector<RingElem> cubes;
  for (const RingElem& u : units)
    if (!elem_eq(u, one) && elem_eq(elem_pow(u, 3), one)) cubes.push_back(u);
  for (size_t a = 0; a < cubes.size(); ++a)
    for (size_t b = a + 1; b < cubes.size(); ++b) {
      auto cl = group_closure(uring, {cubes[a], cubes[b]}, 10000);
      if (!cl) continue;
      if (embeddable_in_q4n(multiplication_table(*cl), n)) continue;
      return unit_order_certificate(I, {cubes[a], cubes[b]}, n);
    }
  return std::nullopt;
}

FreenessCertificate milnor_certificate(const MilnorSquare& sq,
                                       const std::vector<RingElem>& left_gens,
                                       const std::vector<RingElem>& right_gens,
                                       const LatticeIdeal& I, const RingElem& lam1,
                                       const RingElem& lam2, Freeness verdict) {
  LabelResult lr = milnor_label(sq, I, lam1, lam2);
  FreenessCertificate cert;
  cert.method = CertMethod::MilnorLabel;
  cert.verdict = verdict;
  cert.witness = {
      {"top", ring_to_json(sq.top)},
      {"corner1", ring_to_json(sq.corner1)},
      {"corner2", ring_to_json(sq.corner2)},
      {"fiber", ring_to_json(sq.space.ring)},
      {"j1", hom_to_json(sq.j1)},
      {"j2", hom_to_json(sq.j2)},
      {"left_gens", elems_to_json(left_gens)},
      {"right_gens", elems_to_json(right_gens)},
      {"ideal", ideal_to_json(I)},
      {"lambda1", elem_to_json(lam1)},
      {"lambda2", elem_to_json(lam2)},
      {"label_class", lr.cls},
      {"label_rep", lr.rep},
      {"fiber_unit", elem_to_json(lr.fiber_unit)},
  };
  return cert;
}

FreenessCertificate direct_unit_certificate(const FamilyPresentation& p,
                                            const RingElem& alpha,
                                            const RingElem& beta) {
  const RingPtr zq = ring_zq4n(p.n);
  check_same_ring(zq, alpha, "direct_unit_certificate");
  check_same_ring(zq, beta, "direct_unit_certificate");
  RingElem lam = lambda_of(p);
  RingElem xy1 = elem_sub(monomial(zq, 1, 1), ring_one(zq));
  RingElem lhs = elem_add(elem_mul(alpha, xy1), elem_mul(beta, lam));
  if (!elem_eq(lhs, ring_one(zq)))
    fail(Errc::HypothesisFailed,
         "direct_unit_certificate: alpha(xy-1) + beta*lambda != 1");
  FreenessCertificate cert;
  cert.method = CertMethod::DirectUnit;
  cert.verdict = Freeness::Free;
  nlohmann::json ns = nlohmann::json::array(), ms = nlohmann::json::array();
  for (long v : p.ns) ns.push_back(v);
  for (long v : p.ms) ms.push_back(v);
  cert.witness = {
      {"n", p.n},
      {"ns", ns},
      {"ms", ms},
      {"alpha", elem_to_json(alpha)},
      {"beta", elem_to_json(beta)},
      {"alpha_display", format_elem(alpha)},
      {"beta_display", format_elem(beta)},
  };
  return cert;
}

// --- serialization ----------------------------------------------------------

namespace {

std::string kind_name(RingKind k) {
  switch (k) {
    case RingKind::IntegralQ4n: return "IntegralQ4n";
    case RingKind::LambdaHalf: return "LambdaHalf";
    case RingKind::CyclotomicQuaternion: return "CyclotomicQuaternion";
    case RingKind::RationalCyclotomicQuaternion: return "RationalCyclotomicQuaternion";
    case RingKind::MaximalGamma: return "MaximalGamma";
    case RingKind::FiniteQuotient: return "FiniteQuotient";
  }
  return "?";
}

Int int_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Int(j.get<long>());
  return Int(j.get<std::string>());
}

// Full Z-algebra hom check: linear by construction, so multiplicativity on
// basis pairs plus 1 -> 1 suffices.
void verify_hom(const RingHom& f) {
  if (!f.source || !f.target) fail(Errc::BadInput, "hom_from_json: missing rings");
  if (static_cast<int>(f.cols.size()) != f.source->rank)
    fail(Errc::BadInput, "hom_from_json: column count mismatch");
  if (!elem_eq(apply(f, ring_one(f.source)), ring_one(f.target)))
    fail(Errc::BadInput, "hom_from_json: does not send 1 to 1");
  for (int i = 0; i < f.source->rank; ++i)
    for (int j = 0; j < f.source->rank; ++j) {
      std::vector<Int> ci(f.source->rank, 0), cj(f.source->rank, 0);
      ci[i] = 1;
      cj[j] = 1;
      RingElem bi = from_coeffs(f.source, std::move(ci));
      RingElem bj = from_coeffs(f.source, std::move(cj));
      if (!elem_eq(apply(f, elem_mul(bi, bj)), elem_mul(apply(f, bi), apply(f, bj))))
        fail(Errc::BadInput, "hom_from_json: not multiplicative on basis pair " +
                                 std::to_string(i) + "," + std::to_string(j));
    }
}

}  // namespace

nlohmann::json ring_to_json(const RingPtr& r) {
  if (!r) fail(Errc::BadInput, "ring_to_json: null ring");
  nlohmann::json j;
  j["kind"] = kind_name(r->tag.kind);
  j["n"] = r->tag.n;
  if (!r->tag.ds.empty()) j["ds"] = r->tag.ds;
  if (!r->tag.id.empty()) j["id"] = r->tag.id;
  if (r->tag.kind == RingKind::FiniteQuotient) {
    j["modulus"] = r->modulus;
    if (r->fq_parent) j["parent"] = ring_to_json(r->fq_parent);
  }
  return j;
}

RingPtr ring_from_json(const nlohmann::json& j) {
  const std::string k = j.at("kind").get<std::string>();
  if (k == "IntegralQ4n") return ring_zq4n(j.at("n").get<int>());
  if (k == "LambdaHalf") return ring_lambda(j.at("n").get<int>());
  if (k == "CyclotomicQuaternion")
    return ring_cyclotomic(j.at("ds").get<std::vector<int>>(), j.at("n").get<int>(), false);
  if (k == "RationalCyclotomicQuaternion")
    return ring_cyclotomic(j.at("ds").get<std::vector<int>>(), j.at("n").get<int>(), true);
  if (k == "MaximalGamma") return ring_gamma();
  if (k == "FiniteQuotient") {
    const std::string id = j.value("id", std::string());
    if (id == "M2(F2)") return ring_m2f2();
    if (id == "M2(F9)") return ring_m2f9();
    return ring_finite_quotient(ring_from_json(j.at("parent")),
                                j.at("modulus").get<long>(), id);
  }
  fail(Errc::BadInput, "ring_from_json: unknown kind " + k);
}

nlohmann::json elem_to_json(const RingElem& a) {
  nlohmann::json j;
  nlohmann::json c = nlohmann::json::array();
  for (const Int& v : a.c) c.push_back(v.get_str());
  j["c"] = c;
  if (a.den != 1) j["den"] = a.den.get_str();
  return j;
}

RingElem elem_from_json(const RingPtr& r, const nlohmann::json& j) {
  std::vector<Int> c;
  for (const auto& v : j.at("c")) c.push_back(int_from_json(v));
  if (static_cast<int>(c.size()) != r->rank)
    fail(Errc::BadInput, "elem_from_json: coordinate count mismatch");
  Int den = j.contains("den") ? int_from_json(j.at("den")) : Int(1);
  return from_coeffs(r, std::move(c), den);
}

nlohmann::json ideal_to_json(const LatticeIdeal& I) {
  nlohmann::json j;
  j["order"] = ring_to_json(I.order);
  j["generators"] = elems_to_json(I.gens);
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < I.basis.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < I.basis.cols; ++c) row.push_back(I.basis.at(r, c).get_str());
    rows.push_back(row);
  }
  j["hnf"] = rows;
  return j;
}

LatticeIdeal ideal_from_json(const nlohmann::json& j) {
  RingPtr order = ring_from_json(j.at("order"));
  LatticeIdeal I = from_generators(order, elems_from_json(order, j.at("generators")));
  const auto& rows = j.at("hnf");
  if (static_cast<int>(rows.size()) != I.basis.rows)
    fail(Errc::BadInput, "ideal_from_json: stored basis does not match generators");
  for (int r = 0; r < I.basis.rows; ++r)
    for (int c = 0; c < I.basis.cols; ++c)
      if (I.basis.at(r, c) != int_from_json(rows[r][c]))
        fail(Errc::BadInput, "ideal_from_json: stored basis does not match generators");
  return I;
}

nlohmann::json hom_to_json(const RingHom& f) {
  nlohmann::json j;
  j["source"] = ring_to_json(f.source);
  j["target"] = ring_to_json(f.target);
  j["name"] = f.name;
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& col : f.cols) {
    nlohmann::json cj = nlohmann::json::array();
    for (const Int& v : col) cj.push_back(v.get_str());
    cols.push_back(cj);
  }
  j["cols"] = cols;
  nlohmann::json dens = nlohmann::json::array();
  for (const Int& d : f.col_den) dens.push_back(d.get_str());
  j["col_den"] = dens;
  return j;
}

RingHom hom_from_json(const nlohmann::json& j) {
  RingHom f;
  f.source = ring_from_json(j.at("source"));
  f.target = ring_from_json(j.at("target"));
  f.name = j.value("name", std::string());
  for (const auto& cj : j.at("cols")) {
    std::vector<Int> col;
    for (const auto& v : cj) col.push_back(int_from_json(v));
    f.cols.push_back(std::move(col));
  }
  for (const auto& v : j.at("col_den")) f.col_den.push_back(int_from_json(v));
  verify_hom(f);
  return f;
}

RingHom hom_inverse(const RingHom& f) {
  if (!f.source || !f.target) fail(Errc::BadInput, "hom_inverse: missing rings");
  const long m = f.target->modulus;
  if (m <= 0 || f.source->modulus != m)
    fail(Errc::BadInput, "hom_inverse: both rings must be finite with equal modulus");
  const int k = f.source->rank;
  if (f.target->rank != k) fail(Errc::BadInput, "hom_inverse: rank mismatch");
  const Int M(m);
  // augmented Gaussian elimination mod m; pivots must be invertible
  std::vector<std::vector<Int>> a(k, std::vector<Int>(2 * k, 0));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      Int v = f.cols[j][i] % M;
      if (v < 0) v += M;
      a[i][j] = v;
    }
  for (int i = 0; i < k; ++i) a[i][k + i] = 1;
  for (int col = 0; col < k; ++col) {
    int piv = -1;
    Int inv;
    for (int r = col; r < k; ++r) {
      if (mpz_invert(inv.get_mpz_t(), a[r][col].get_mpz_t(), M.get_mpz_t())) {
        piv = r;
        break;
      }
    }
    if (piv < 0) fail(Errc::BadInput, "hom_inverse: matrix not invertible mod m");
    std::swap(a[piv], a[col]);
    for (int c = 0; c < 2 * k; ++c) a[col][c] = a[col][c] * inv % M;
    for (int r = 0; r < k; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Int factor = a[r][col];
      for (int c = 0; c < 2 * k; ++c) {
        a[r][c] = (a[r][c] - factor * a[col][c]) % M;
        if (a[r][c] < 0) a[r][c] += M;
      }
    }
  }
  RingHom g;
  g.source = f.target;
  g.target = f.source;
  g.name = "inv(" + f.name + ")";
  g.cols.assign(k, std::vector<Int>(k, 0));
  g.col_den.assign(k, Int(1));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) g.cols[j][i] = a[i][k + j];
  for (int i = 0; i < k; ++i) {
    std::vector<Int> e(k, 0);
    e[i] = 1;
    RingElem bs = from_coeffs(f.source, e);
    if (!elem_eq(apply(g, apply(f, bs)), bs))
      fail(Errc::BadInput, "hom_inverse: inverse verification failed");
    RingElem bt = from_coeffs(f.target, std::move(e));
    if (!elem_eq(apply(f, apply(g, bt)), bt))
      fail(Errc::BadInput, "hom_inverse: inverse verification failed");
  }
  return g;
}

nlohmann::json certificate_json(const FreenessCertificate& c) {
  return {
      {"schema", "qlat-certificate/1"},
      {"method", cert_method_name(c.method)},
      {"verdict", freeness_name(c.verdict)},
      {"witness", c.witness},
  };
}

bool replay_certificate(const nlohmann::json& cert) {
  if (cert.value("schema", std::string()) != "qlat-certificate/1")
    fail(Errc::BadInput, "replay_certificate: unknown schema");
  const std::string method = cert.at("method").get<std::string>();
  const Freeness verdict = freeness_from_name(cert.at("verdict").get<std::string>());
  const nlohmann::json& w = cert.at("witness");

  if (method == "BHJ") {
    LatticeIdeal I = ideal_from_json(w.at("ideal"));
    RingElem alpha = elem_from_json(ring_gamma(), w.at("alpha"));
    std::vector<RingElem> rgens =
        elems_from_json(ring_m2f2(), w.at("gamma_unit_image_gens"));
    FreenessCertificate c2 = bhj_free(I, alpha, rgens);
    return c2.verdict == verdict && c2.witness.at("psi_alpha") == w.at("psi_alpha") &&
           c2.witness.at("class_reps") == w.at("class_reps");
  }
  if (method == "UnitOrderObstruction") {
    LatticeIdeal I = ideal_from_json(w.at("ideal"));
    RingPtr ur = ring_from_json(w.at("unit_ring"));
    FreenessCertificate c2 =
        unit_order_certificate(I, elems_from_json(ur, w.at("units")), w.at("n").get<int>());
    return c2.verdict == verdict &&
           c2.witness.at("closure_order") == w.at("closure_order") &&
           c2.witness.at("element_orders") == w.at("element_orders");
  }
  if (method == "MilnorLabel") {
    MilnorSquare sq;
    sq.top = ring_from_json(w.at("top"));
    sq.corner1 = ring_from_json(w.at("corner1"));
    sq.corner2 = ring_from_json(w.at("corner2"));
    RingPtr fiber = ring_from_json(w.at("fiber"));
    sq.j1 = hom_from_json(w.at("j1"));
    sq.j2 = hom_from_json(w.at("j2"));
    sq.space = double_cosets(fiber, elems_from_json(fiber, w.at("left_gens")),
                             elems_from_json(fiber, w.at("right_gens")));
    LatticeIdeal I = ideal_from_json(w.at("ideal"));
    RingElem lam1 = elem_from_json(sq.corner1, w.at("lambda1"));
    RingElem lam2 = elem_from_json(sq.corner2, w.at("lambda2"));
    LabelResult lr = milnor_label(sq, I, lam1, lam2);
    return lr.cls == w.at("label_class").get<int>() &&
           lr.rep == w.at("label_rep").get<std::string>() &&
           elem_to_json(lr.fiber_unit) == w.at("fiber_unit");
  }
  if (method == "DirectUnit") {
    FamilyPresentation p;
    p.n = w.at("n").get<int>();
    p.ns = w.at("ns").get<std::vector<long>>();
    p.ms = w.at("ms").get<std::vector<long>>();
    RingPtr zq = ring_zq4n(p.n);
    FreenessCertificate c2 = direct_unit_certificate(
        p, elem_from_json(zq, w.at("alpha")), elem_from_json(zq, w.at("beta")));
    return c2.verdict == verdict;
  }
  fail(Errc::BadInput, "replay_certificate: unknown method " + method);
}

}  // namespace qlat
