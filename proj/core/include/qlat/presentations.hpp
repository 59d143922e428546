#pragma once
// Balanced two-generator presentations of the quaternion groups Q_4n:
// the exponent family P_n(n_1..n_k; m_1..m_k) with relators x^n y^-2 and
// R(x, yxy^-1) for R = a^{n_1} b^{m_1} ... a^{n_{k+1}} b^{m_{k+1}},
// n_{k+1} = 1 - sum(n_i), m_{k+1} = 1 - sum(m_i); equivalence moves; the
// height-one normal form; the even-palindrome family; abelianization; and
// rewriting a raw second relator into family form.
#include <optional>
#include <string>
#include <vector>

#include "qlat/intmat.hpp"
#include "qlat/words.hpp"

namespace qlat {

struct FamilyPresentation {
  int n = 2;
  std::vector<long> ns;  // heights 1..k; entries nonzero
  std::vector<long> ms;  // same length as ns
  bool operator==(const FamilyPresentation&) const = default;
};

// The standard presentation P_n^std is the k = 0 member.
FamilyPresentation std_presentation(int n);
// E_{n,r} = P_n(2; 1-r).
FamilyPresentation e_presentation(int n, long r);

int height(const FamilyPresentation& p);
// Derived tail exponents n_{k+1} = 1 - sum(ns), m_{k+1} = 1 - sum(ms).
long tail_n(const FamilyPresentation& p);
long tail_m(const FamilyPresentation& p);
void validate(const FamilyPresentation& p);
std::string describe(const FamilyPresentation& p);

struct RawPresentation {
  int n = 2;
  Word second_relator;  // over {x, y}; first relator implicitly x^n y^-2
};

// R(a, b) over generators a, b, with derived tails appended.
Word family_word_ab(const FamilyPresentation& p);
// Second relator R(x, yxy^-1) in F(x, y), freely reduced.
Word relator(const FamilyPresentation& p);
// First relator x^n y^-2.
Word first_relator(int n);

enum class MoveType { I, II, III };
// Move I rewrites exponents mod n (replacements supplied, validated nonzero
// and congruent); moves II / III permute the exponent pairs including the
// derived tail pair.
FamilyPresentation apply_move(const FamilyPresentation& p, MoveType move,
                              const std::vector<long>* repl_ns = nullptr,
                              const std::vector<long>* repl_ms = nullptr);

// Canonical equivalent of a height-one presentation with
// 1 <= n_1' <= m_1' <= ceil(n/2); collapses to P_n^std when either
// coordinate reaches 1.  Also accepts k = 0 (returns it unchanged).
FamilyPresentation height_one_normal_form(const FamilyPresentation& p);

// P_n(n_1..n_k; -n_k..-n_1) from even nonzero entries.
FamilyPresentation even_palindrome(int n, const std::vector<long>& ns);

// Nontrivial invariant factors of the abelianized group, descending order
// (e.g. (2, 2) for genuine presentations with n even, (4) for n odd).
std::vector<Int> abelianization(const FamilyPresentation& p);
std::vector<Int> abelianization(const RawPresentation& p);

// Rewrite a raw second relator into the exponent family by eliminating
// y^{+-2} |-> x^{+-n}, regrouping into (x^{n_i} y x^{m_i} y^-1) blocks,
// balancing the two exponent-sum ladders, normalizing the total sum to +1,
// and stripping zero exponents.  Throws NotReducible when the cascade ends
// in a relator of the form x^m (the input cannot present Q_4n regularly).
FamilyPresentation regular_normal_form(const RawPresentation& p);

}  // namespace qlat
