#include "qlat/words.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace qlat {

bool is_reduced(const Word& w) {
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i].exp == 0) return false;
    if (i + 1 < w.size() && w[i].gen == w[i + 1].gen) return false;
  }
  return true;
}

Word reduce_word(const Word& w) {
  Word out;
  for (const Letter& l : w) {
    if (l.exp == 0) continue;
    if (!out.empty() && out.back().gen == l.gen) {
      out.back().exp += l.exp;
      if (out.back().exp == 0) out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  // Merging can expose new adjacencies only at the join point, which the
  // stack handles; out is reduced.
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.insert(w.end(), b.begin(), b.end());
  return reduce_word(w);
}

Word invert(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    out.push_back({it->gen, -it->exp});
  return reduce_word(out);
}

Word cyclic_shift(const Word& w) {
  Word r = reduce_word(w);
  if (r.empty()) return r;
  long s = r.front().exp > 0 ? 1 : -1;
  Word rest = r;
  rest.front().exp -= s;
  rest.push_back({r.front().gen, s});
  return reduce_word(rest);
}

Word concat_inv_cycle(const Word& w1, const Word& w2, WordOp op) {
  switch (op) {
    case WordOp::Concat: return concat(w1, w2);
    case WordOp::Invert: return invert(w1);
    case WordOp::Cycle: return cyclic_shift(w1);
  }
  throw std::invalid_argument("concat_inv_cycle: bad op");
}

Word word_power(char gen, long e) {
  if (e == 0) return {};
  return {Letter{gen, e}};
}

long exp_sum(const Word& w, char gen) {
  long s = 0;
  for (const Letter& l : w)
    if (l.gen == gen) s += l.exp;
  return s;
}

Word substitute(const Word& r, const Word& img_a, const Word& img_b,
                char a, char b) {
  Word out;
  for (const Letter& l : r) {
    const Word* img = nullptr;
    if (l.gen == a) img = &img_a;
    else if (l.gen == b) img = &img_b;
    else throw std::invalid_argument("substitute: unexpected generator");
    Word piece = l.exp >= 0 ? *img : invert(*img);
    long times = l.exp >= 0 ? l.exp : -l.exp;
    for (long i = 0; i < times; ++i)
      out.insert(out.end(), piece.begin(), piece.end());
  }
  return reduce_word(out);
}

Word parse_word(const std::string& s) {
  Word w;
  size_t i = 0;
  auto skip_ws = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
  skip_ws();
  if (i < s.size() && s[i] == '1' ) {
    size_t j = i + 1;
    while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j == s.size()) return {};
  }
  while (i < s.size()) {
    skip_ws();
    if (i >= s.size()) break;
    char g = s[i];
    if (!std::isalpha(static_cast<unsigned char>(g)))
      throw std::invalid_argument("parse_word: expected generator at '" + s.substr(i) + "'");
    ++i;
    long e = 1;
    if (i < s.size() && s[i] == '^') {
      ++i;
      bool neg = false;
      if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        neg = s[i] == '-';
        ++i;
      }
      if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
        throw std::invalid_argument("parse_word: expected exponent in '" + s + "'");
      e = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        e = e * 10 + (s[i] - '0');
        ++i;
      }
      if (neg) e = -e;
    }
    w.push_back({g, e});
  }
  return reduce_word(w);
}

std::string format_word(const Word& w) {
  Word r = reduce_word(w);
  if (r.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < r.size(); ++i) {
    if (i) s += ' ';
    s += r[i].gen;
    if (r[i].exp != 1) {
      s += '^';
      s += std::to_string(r[i].exp);
    }
  }
  return s;
}

}  // namespace qlat
