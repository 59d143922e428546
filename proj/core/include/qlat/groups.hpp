#pragma once
// Concrete quaternion groups Q_4n = <x, y | x^n y^-2, xyxy^-1>, their
// automorphisms theta_{a,b}, subgroup enumeration with embedding tests,
// and Todd-Coxeter coset enumeration for presentation verification.
#include <optional>
#include <vector>

#include "qlat/presentations.hpp"
#include "qlat/words.hpp"

namespace qlat {

// x^i y^j with i mod 2n, j in {0,1}; y^2 = x^n and y x^a = x^-a y.
struct Q4nElement {
  int n = 2;
  int i = 0;
  int j = 0;
  bool operator==(const Q4nElement&) const = default;
};

Q4nElement q4n_identity(int n);
Q4nElement q4n_x(int n, long e = 1);
Q4nElement q4n_y(int n);
Q4nElement q4n_mul(const Q4nElement& a, const Q4nElement& b);
Q4nElement q4n_inv(const Q4nElement& a);
Q4nElement q4n_pow(const Q4nElement& a, long e);
int q4n_order(const Q4nElement& a);

// Image of a word over {x, y} under x |-> x, y |-> y.
Q4nElement evaluate(const Word& w, int n);

// theta_{a,b}: x |-> x^a, y |-> x^b y (a a unit mod 2n).  Only n >= 3 is
// supported; Aut(Q_8) is larger and out of scope.
struct Q4nAutomorphism {
  int n = 2;
  int a = 1;
  int b = 0;
  bool operator==(const Q4nAutomorphism&) const = default;
};

Q4nElement apply_aut(const Q4nAutomorphism& t, const Q4nElement& g);
Q4nAutomorphism compose(const Q4nAutomorphism& s, const Q4nAutomorphism& t);
Q4nAutomorphism inverse(const Q4nAutomorphism& t);
std::vector<Q4nAutomorphism> q4n_automorphisms(int n);
// One representative per class of Out(Q_4n) = Aut / Inn, where
// Inn = {theta_{a,b} : a = +-1, b even}.
std::vector<Q4nAutomorphism> q4n_out_representatives(int n);

// Coset enumeration over F(x, y): HLT-style relator tracing with immediate
// coincidence handling and deterministic row filling.
struct ToddCoxeterResult {
  bool closed = false;  // false = table exceeded max_cosets (Overflow)
  long cosets = 0;      // valid when closed
};
ToddCoxeterResult todd_coxeter(const std::vector<Word>& relators,
                               const std::vector<Word>& subgroup_gens,
                               long max_cosets);

enum class PresentsVerdict { Regular, No, Unknown };
// Regular iff the relators hold in Q_4n (they always do for the exponent
// family) and the enumerated order is exactly 4n; Unknown only on overflow.
PresentsVerdict presents_q4n(const FamilyPresentation& p);
PresentsVerdict presents_q4n(const FamilyPresentation& p, long max_cosets);

enum class RawPresentsVerdict { Regular, PresentsNonStandard, No, Unknown };
// For a raw second relator: Regular when the identity map is an
// isomorphism; PresentsNonStandard when only x |-> xy, y |-> y works
// (possible only for n = 2 mod 4).
RawPresentsVerdict presents_q4n(const RawPresentation& p);
RawPresentsVerdict presents_q4n(const RawPresentation& p, long max_cosets);

long default_max_cosets(int n);

// A small abstract group as a multiplication table (mul[a][b] = ab).
struct SmallGroup {
  int order = 1;
  std::vector<std::vector<int>> mul;
};

bool is_group_table(const SmallGroup& g);
std::vector<int> element_orders(const SmallGroup& g);
SmallGroup q4n_table(int n);
// All subgroups of Q_4n as sorted element lists (cyclic and quaternion).
std::vector<std::vector<Q4nElement>> q4n_subgroups(int n);
bool isomorphic(const SmallGroup& a, const SmallGroup& b);

// Does h embed in Q_4n?  Lagrange prefilter, then exhaustive subgroup
// enumeration with multiplication-table isomorphism search.
bool embeddable_in_q4n(const SmallGroup& h, int n);

}  // namespace qlat
