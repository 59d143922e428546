#pragma once

#include <optional>
#include <vector>

#include "qlat/groups.hpp"
#include "qlat/grouprings.hpp"
#include "qlat/intmat.hpp"
#include "qlat/presentations.hpp"

namespace qlat {

// A full-rank left ideal of an order, stored as an integer lattice in
// canonical row Hermite normal form over the order's Z-basis.  Equal ideals
// have bit-identical bases.  The generators it was built from are kept for
// maps and twists.
struct LatticeIdeal {
  RingPtr order;
  IMat basis;
  std::vector<RingElem> gens;
};

// Lattice spanned by {b * g : b order basis element, g generator}, in HNF.
// Left-ideal closure is re-verified on construction.
LatticeIdeal from_generators(const RingPtr& order, const std::vector<RingElem>& gens);

bool ideal_equal(const LatticeIdeal& a, const LatticeIdeal& b);

// Membership.  `a` may live in the order's ring or in its rational companion
// (same polynomial modulus with rational coefficients) when allow_rational.
bool contains(const LatticeIdeal& i, const RingElem& a, bool allow_rational = false);

// Index [order : I] (determinant of the HNF basis).
Int ideal_index(const LatticeIdeal& i);

// Target ideal generated by the images of I's generators.
LatticeIdeal map_ideal(const RingHom& f, const LatticeIdeal& i);
LatticeIdeal map_ideal(const RingPtr& target, const LatticeIdeal& i);

// Ideal generated by the theta^{-1}-images of I's generators (I_theta).
LatticeIdeal twist(const LatticeIdeal& i, const Q4nAutomorphism& theta);

// Apply an automorphism of Q_4n linearly to a group-ring element.
RingElem elem_apply_aut(const Q4nAutomorphism& t, const RingElem& a);

// v * u in I for every basis row v (u may be rational).
bool right_mul_stable(const LatticeIdeal& i, const RingElem& u);

// I = (lam) as lattices; lam = 0 gives false for the full-rank ideals here.
bool principal_equals(const LatticeIdeal& i, const RingElem& lam);

// Lattice {v * d : v in I} (right multiplication by d).
LatticeIdeal ideal_right_mul(const LatticeIdeal& i, const RingElem& d);

// HNF of the union of two ideals over the same order.
LatticeIdeal ideal_sum(const LatticeIdeal& a, const LatticeIdeal& b);

// The ideal of ZQ_4n representing the homotopy type of a regular family
// presentation: (1 + (1-xy)alpha, lambda alpha).
LatticeIdeal ideal_representative(const FamilyPresentation& p);

// --- Right orders and short-vector searches (cyclotomic-quaternion orders,
// --- positive-definite regular trace form) ---

// Z-basis of the right order O_r(I) = { v : I v <= I } inside the rational
// companion ring of I's order.
std::vector<RingElem> right_order_basis(const LatticeIdeal& i);

// All units of reduced norm 1 in O_r(I): the vectors of minimal regular
// trace, enumerated exactly (Fincke-Pohst) and sorted canonically.  These
// form a finite group for the definite orders handled here.
std::vector<RingElem> right_order_norm_one_units(const LatticeIdeal& i);

// Search I for a generator (I = order * g) among its vectors of regular
// trace <= max_q, in increasing order; max_q = 0 widens the shell from
// 4 * rank up to 32 * rank.  Returns the first generator found (minimal in
// (trace, coordinate) order), or nullopt (not a non-principality proof).
std::optional<RingElem> principal_generator(const LatticeIdeal& i, const Int& max_q = 0);

// --- Gamma-side lattices (n = 8 maximal order) ---

// Convert generators over Lambda (x^8+1) or Gamma into a Gamma-ideal.
LatticeIdeal gamma_ideal(const std::vector<RingElem>& gens);

// Gamma * I = (alpha) as rank-16 lattices; when check_conductor_sum is set,
// additionally verifies I + tau*Gamma = Lambda inside Lambda coordinates.
bool gamma_extend(const LatticeIdeal& i, const RingElem& gamma_alpha,
                  bool check_conductor_sum);

}  // namespace qlat
