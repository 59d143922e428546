#pragma once
// Exact arithmetic in the integral group ring ZQ_4n, the quotient order
// Lambda = ZQ_4n/(x^n+1), cyclotomic quaternion orders Z[zeta_d, j] and their
// rational spans, the maximal order Gamma at n = 8, and finite quotient
// rings.  All element coordinates are exact (numerator vector over a common
// positive denominator).
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qlat/intmat.hpp"
#include "qlat/words.hpp"

namespace qlat {

enum class RingKind {
  IntegralQ4n,              // Z[x,y]/(x^{2n}-1, y^2-x^n, yx-x^{-1}y), rank 4n
  LambdaHalf,               // quotient by x^n + 1, rank 2n
  CyclotomicQuaternion,     // quotient by prod Phi_d(x), d in ds
  RationalCyclotomicQuaternion,  // same with rational coefficients allowed
  MaximalGamma,             // the maximal order at n = 8, Z-rank 16
  FiniteQuotient            // structure constants over Z/m
};

struct RingTag {
  RingKind kind = RingKind::IntegralQ4n;
  int n = 2;             // group parameter: y^2 = x^n
  std::vector<int> ds;   // cyclotomic divisor list (kind Cyclotomic*)
  std::string id;        // finite-quotient identifier
  bool operator==(const RingTag&) const = default;
};

std::string tag_string(const RingTag& t);

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

// Immutable ring descriptor.  Polynomial-quaternion rings store the monic
// modulus h(x) | x^{2n}-1; elements are p(x) + q(x)y with deg p, q < deg h.
// Finite quotients either defer to a parent polynomial ring (coefficients
// mod m) or carry an explicit multiplication table.
class Ring {
 public:
  RingTag tag;
  int rank = 0;          // Z-basis size (2*deg h for poly rings)
  long modulus = 0;      // 0 = characteristic zero
  bool rational = false; // elements may carry denominators

  // polynomial rings
  std::vector<Int> h;        // monic modulus, h[i] = coeff of x^i
  int deg = 0;               // deg h
  std::vector<std::vector<Int>> xpow;  // x^k mod h for k = 0..2n
  std::vector<std::vector<Int>> barx;  // x^{-k} mod h for k = 0..deg-1
  int jsq = 0;               // +1/-1 when x^n mod h is scalar, else 0

  // finite quotients
  RingPtr fq_parent;                                  // optional
  std::vector<std::vector<std::vector<long>>> table;  // basis products

  std::vector<std::string> basis_labels;
};

struct RingElem {
  RingPtr ring;
  std::vector<Int> c;  // numerator coordinates in the ring basis
  Int den = 1;         // positive; gcd(content(c), den) = 1 after normalize
};

// --- ring constructors (memoized; descriptors are shareable) --------------
RingPtr ring_zq4n(int n);
RingPtr ring_lambda(int n);
RingPtr ring_cyclotomic(const std::vector<int>& ds, int n, bool rational_span);
RingPtr ring_gamma();  // n = 8
// Coefficientwise reduction of a polynomial ring mod m.
RingPtr ring_finite_quotient(const RingPtr& parent, long m, const std::string& id);
RingPtr ring_m2f2();  // M_2(F_2), basis E11, E12, E21, E22
RingPtr ring_m2f9();  // M_2(F_9), F_9 = F_3[z]/(z^2-2), rank 8 over Z/3

// cyclotomic polynomial Phi_d as integer coefficients
std::vector<Int> cyclotomic_poly(int d);

// --- element constructors ---------------------------------------------------
RingElem ring_zero(const RingPtr& r);
RingElem ring_one(const RingPtr& r);
RingElem from_coeffs(const RingPtr& r, std::vector<Int> c, Int den = 1);
// x^e * y^j, e arbitrary (reduced mod 2n first), j in {0, 1}
RingElem monomial(const RingPtr& r, long xexp, int yexp = 0, Int coeff = 1);
// p(x) + q(x) y from coefficient lists (index = power of x)
RingElem from_x_poly(const RingPtr& r, const std::vector<Int>& p,
                     const std::vector<Int>& q = {});
RingElem word_image(const RingPtr& r, const Word& w);  // over x, y
Int augmentation(const RingElem& a);                   // IntegralQ4n only
RingElem norm_element(const RingPtr& zq);              // N = sum of all g

// --- arithmetic -------------------------------------------------------------
RingElem elem_add(const RingElem& a, const RingElem& b);
RingElem elem_sub(const RingElem& a, const RingElem& b);
RingElem elem_mul(const RingElem& a, const RingElem& b);
RingElem elem_neg(const RingElem& a);
RingElem elem_scale(const Int& k, const RingElem& a);
RingElem elem_pow(const RingElem& a, long e);  // e >= 0
bool elem_eq(const RingElem& a, const RingElem& b);
bool elem_is_zero(const RingElem& a);
// Multiplicative inverse in a finite quotient ring (adjugate of the regular
// representation); fails with NonUnitGenerator if not a unit.
RingElem finite_inverse(const RingElem& a);
bool finite_is_unit(const RingElem& a);

// x-part / y-part split: a = x_part + y_part * y (poly rings)
std::vector<Int> x_part(const RingElem& a);
std::vector<Int> y_part(const RingElem& a);

// --- involution, norms, Swan modules ---------------------------------------
// sum a_g g  |->  sum a_g g^{-1}; on p + qy this is pbar + x^n q y.
RingElem involution(const RingElem& a);
// nr(p + qj) = p pbar - j^2 q qbar in the real subfield (requires x^n mod h
// scalar); returned as an element with vanishing y-part, checked
// bar-invariant.
RingElem reduced_norm(const RingElem& u);
// (N, r*1) over ZQ_4n; requires gcd(r, 4n) = 1.
std::pair<RingElem, RingElem> swan_ideal_generators(int n, long r);

// --- Fox calculus -----------------------------------------------------------
// Free derivative d/d(gen) of w evaluated in ZQ_4n via x|->x, y|->y.
RingElem fox_derivative(const RingPtr& zq, const Word& w, char gen);

// --- ring homomorphisms -----------------------------------------------------
struct RingHom {
  RingPtr source, target;
  std::string name;
  // images of the source Z-basis: cols[j] = numerator coords, over col_den[j]
  std::vector<std::vector<Int>> cols;
  std::vector<Int> col_den;
};

RingElem apply(const RingHom& f, const RingElem& a);
RingHom compose(const RingHom& g, const RingHom& f);  // g after f
// Builds and verifies a hom by images of x and y: checks h(X) = 0,
// Y^2 = X^n and YX = X^{-1}Y in the target.
RingHom hom_from_xy_images(const RingPtr& src, const RingPtr& tgt,
                           const RingElem& img_x, const RingElem& img_y,
                           const std::string& name);
// Canonical coefficient-reduction map along the declared tower
// ZQ_4n -> Lambda -> Lambda_d -> rational span / finite quotient.
// Fails with NoDeclaredMap otherwise.
RingElem quotient_map(const RingElem& a, const RingPtr& target);
RingHom declared_hom(const RingPtr& source, const RingPtr& target);

// --- Gamma (maximal order at n = 8) ----------------------------------------
// tau = zeta_16 + zeta_16^{-1}; returns the monic minimal polynomial
// coefficients c with tau^4 + c[3]tau^3 + c[2]tau^2 + c[1]tau + c[0] = 0,
// derived from exact powers of tau in Z[zeta_16].
std::vector<Int> derive_tau_minpoly();

struct GammaCoordinates {
  bool in_gamma = false;
  std::vector<Int> coords;      // 16 entries when in_gamma
  std::string fractional_note;  // offending coordinate otherwise
};
// Coordinates of a in Q[zeta_16, j] over the Z[tau]-basis
// (1, zeta, (zeta+j)/tau, (1+zeta j)/tau); basis order:
// gamma_i * tau^k at index 4*(i-1) + k.
GammaCoordinates gamma_coordinates(const RingElem& a);
RingElem gamma_elem(const std::vector<Int>& coords16);
RingElem gamma_to_rational(const RingElem& g);
RingElem gamma_mul(const RingElem& a, const RingElem& b);
// The residue map Gamma -> Gamma/tau*Gamma realized on M_2(F_2) through a
// verified isomorphism; see cases for the basis identification.
RingHom gamma_residue_hom();

// --- text / JSON ------------------------------------------------------------
std::string format_elem(const RingElem& a);
RingElem parse_elem(const RingPtr& r, const std::string& text);
std::string elem_json(const RingElem& a);

}  // namespace qlat
