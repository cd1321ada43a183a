#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "currents/errors.hpp"

namespace currents {

// A letter is a nonzero signed generator id: +k is generator k (1-based),
// -k its inverse. Generator ids alternate x1=1, y1=2, x2=3, y2=4, ...
using Letter = std::int8_t;

struct GroupWord {
  std::vector<Letter> letters;

  GroupWord() = default;
  explicit GroupWord(std::vector<Letter> ls) : letters(std::move(ls)) {}

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }

  GroupWord inverse() const;

  bool operator==(const GroupWord& o) const { return letters == o.letters; }
  bool operator!=(const GroupWord& o) const { return letters != o.letters; }
};

// Lexicographic order used everywhere a deterministic tie-break is needed.
// Shorter words first; letters ranked x1 < X1 < y1 < Y1 < x2 < ...
int letter_rank(Letter l);
bool word_less(const GroupWord& a, const GroupWord& b);

struct WordHash {
  std::size_t operator()(const GroupWord& w) const;
};

struct SurfacePresentation {
  int genus = 2;
  GroupWord relator;  // product of commutators, length 4g

  explicit SurfacePresentation(int g);
  int num_generators() const { return 2 * genus; }
};

// Word syntax: whitespace-separated tokens x<i>, y<i>, X<i>, Y<i>;
// uppercase means inverse. Empty string is the identity.
GroupWord parse_word(const std::string& text, const SurfacePresentation& p);
std::string format_word(const GroupWord& w);

// Free reduction; idempotent.
GroupWord reduce_word(GroupWord w);

// Cyclic free reduction (strips matching first/last letters after reduce).
GroupWord cyclic_reduce(GroupWord w);

struct ConjugacyClass {
  GroupWord canonical;       // cyclically reduced, Dehn-reduced, lex-least
  GroupWord primitive_root;  // canonical form of the root
  int exponent = 1;          // canonical == root^exponent as a class

  std::size_t length() const { return canonical.size(); }
  bool operator==(const ConjugacyClass& o) const {
    return canonical == o.canonical;
  }
  bool operator!=(const ConjugacyClass& o) const {
    return canonical != o.canonical;
  }
};

struct ClassHash {
  std::size_t operator()(const ConjugacyClass& c) const {
    return WordHash{}(c.canonical);
  }
};

bool class_less(const ConjugacyClass& a, const ConjugacyClass& b);

// Canonical form of the conjugacy class of w, invariant under conjugation
// and inversion. Uses cyclic free reduction, cyclic Dehn reduction against
// the relator, saturation of half-relator rewrites, then lexicographic
// minimization over rotations and the inverse. Throws TrivialWord if w
// reduces to the identity.
ConjugacyClass conjugacy_canonical(const GroupWord& w,
                                   const SurfacePresentation& p);

ConjugacyClass class_of(const std::string& text, const SurfacePresentation& p);

// (root, k) with c = root^k and root primitive. Detected on the cyclic word;
// callers with a hyperbolic structure cross-check translation lengths.
std::pair<ConjugacyClass, int> primitive_root(const ConjugacyClass& c,
                                              const SurfacePresentation& p);

// All distinct conjugacy classes with a cyclically reduced representative of
// length <= max_len, sorted by canonical form. Throws BudgetExceeded if more
// than class_cap classes would be produced.
std::vector<ConjugacyClass> enumerate_conjugacy_classes(
    const SurfacePresentation& p, int max_len,
    std::size_t class_cap = 1000000);

}  // namespace currents
