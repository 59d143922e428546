#pragma once

#include <array>
#include <utility>
#include <vector>

#include "qlat/grouprings.hpp"
#include "qlat/intmat.hpp"
#include "qlat/presentations.hpp"

namespace qlat {

// sigma(m) = 1 + x + ... + x^{m-1} for m >= 0, with sigma(0) = 0.
RingElem sigma_x(const RingPtr& r, long m);

// lambda_R of a family presentation, supported on Z<x> <= ZQ_4n.
// Cross-checked on construction against the Fox-derivative factorization
// (d_x R', d_y R') = lambda_R * (1+xy, x-1).
RingElem lambda_of(const FamilyPresentation& p);

struct UnitEquationSolution {
  bool found = false;     // false: the reduced equation has no solution over ZC_n
  RingElem alpha, beta;   // alpha(xy-1) + beta*lambda = 1 in ZQ_4n
  RingElem delta, gamma;  // reduced-equation witnesses, supported on Z<x>
};

// Solve delta*q(lambda) + gamma*q(lambda-bar) = 1 over ZC_n exactly, pick the
// canonical smallest solution, and lift to alpha, beta in ZQ_4n.  The returned
// solution always re-verifies alpha(xy-1) + beta*lambda = 1.
UnitEquationSolution solve_unit_equation(const RingElem& lambda, int n);

struct MpAlpha {
  long t = 0;
  int residue = 0;  // r = 3t + residue mod n, residue in {0, 1}
  RingElem alpha, beta;
};

// Closed-form alpha_t (and companion beta) for lambda = 1 + x - x^r, using the
// minimal t >= 0 with r = 3t or 3t+1 mod n.  Verifies
// alpha(xy-1) + beta(1+x-x^r) = 1 before returning.
MpAlpha mp_alpha(int n, long r);

// Generator pair (1 + (1-xy)alpha, lambda*alpha) of the ideal attached to a
// regular family presentation, with alpha from the canonical unit-equation
// solution.  NoSolution surfaces as NotRegular.
std::pair<RingElem, RingElem> ideal_generator_pair(const FamilyPresentation& p);

struct ChainBoundaries {
  std::array<std::array<RingElem, 2>, 2> d2;  // rows = Fox derivatives of the relators
  std::array<RingElem, 2> d1;                 // column (x-1, y-1)
};

// Boundary maps of the chain complex attached to the presentation; the
// composite d2 * d1 is verified to vanish.
ChainBoundaries chain_boundaries(const FamilyPresentation& p);

enum class F2C3 { Pass, Obstructed };

// Reduce the unit equation through F_2 C_3 (needs 3 | n) and decide
// solvability by exhaustion; Obstructed certifies the presentation is not
// regular.
F2C3 f2c3_obstruction(const FamilyPresentation& p);

// Canonical smallest point of the affine lattice coset x0 + rowspan(kernel):
// minimizes the maximum absolute entry, then minimizes lexicographically with
// entries ordered by 0 < 1 < -1 < 2 < -2 < ...; falls back to a deterministic
// nearest-plane point if the bounded search exceeds its node budget.
std::vector<Int> canonical_coset_point(const std::vector<Int>& x0, const IMat& kernel);

}  // namespace qlat
