#pragma once
// Words in a free group on named generators, in syllable form
// (generator, exponent).  Used for relators of two-generator presentations
// and as the domain of Fox derivatives.
#include <string>
#include <vector>

namespace qlat {

struct Letter {
  char gen = 'x';
  long exp = 0;
  bool operator==(const Letter&) const = default;
};

// A word is a syllable sequence; the reduced form has nonzero exponents and
// no two adjacent syllables with the same generator.
using Word = std::vector<Letter>;

bool is_reduced(const Word& w);
Word reduce_word(const Word& w);
Word concat(const Word& a, const Word& b);
Word invert(const Word& w);
// Cyclic permutation by one letter: the first single-generator unit moves
// to the end, then the word is reduced.
Word cyclic_shift(const Word& w);

enum class WordOp { Concat, Invert, Cycle };
// Dispatcher form: Concat uses both arguments, Invert/Cycle use w1 only.
Word concat_inv_cycle(const Word& w1, const Word& w2, WordOp op);

// w^e as a single syllable (empty when e == 0).
Word word_power(char gen, long e);
// Total exponent of `gen` in w.
long exp_sum(const Word& w, char gen);

// Substitute words for the two generators of r (default names a, b) and
// reduce: the image of r under a |-> img_a, b |-> img_b.
Word substitute(const Word& r, const Word& img_a, const Word& img_b,
                char a = 'a', char b = 'b');

// Syntax: whitespace-separated syllables like "x^3 y x^-2 y^-1"; "1" or an
// empty string denotes the empty word.  Throws std::invalid_argument on
// malformed input.
Word parse_word(const std::string& s);
std::string format_word(const Word& w);

}  // namespace qlat
