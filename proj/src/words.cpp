#include "currents/words.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_set>

namespace currents {

GroupWord GroupWord::inverse() const {
  GroupWord r;
  r.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it)
    r.letters.push_back(static_cast<Letter>(-*it));
  return r;
}

int letter_rank(Letter l) {
  int idx = std::abs(static_cast<int>(l)) - 1;
  return 2 * idx + (l < 0 ? 1 : 0);
}

bool word_less(const GroupWord& a, const GroupWord& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    int ra = letter_rank(a.letters[i]);
    int rb = letter_rank(b.letters[i]);
    if (ra != rb) return ra < rb;
  }
  return false;
}

std::size_t WordHash::operator()(const GroupWord& w) const {
  std::size_t h = 1469598103934665603ull;
  for (Letter l : w.letters) {
    h ^= static_cast<std::size_t>(static_cast<unsigned char>(l));
    h *= 1099511628211ull;
  }
  return h;
}

bool class_less(const ConjugacyClass& a, const ConjugacyClass& b) {
  return word_less(a.canonical, b.canonical);
}

SurfacePresentation::SurfacePresentation(int g) : genus(g) {
  if (g < 2) raise(ErrorKind::UnsupportedGenus, "genus must be >= 2");
  for (int i = 0; i < g; ++i) {
    Letter x = static_cast<Letter>(2 * i + 1);
    Letter y = static_cast<Letter>(2 * i + 2);
    relator.letters.push_back(x);
    relator.letters.push_back(y);
    relator.letters.push_back(static_cast<Letter>(-x));
    relator.letters.push_back(static_cast<Letter>(-y));
  }
}

GroupWord parse_word(const std::string& text, const SurfacePresentation& p) {
  GroupWord w;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok.size() < 2)
      raise(ErrorKind::SchemaError, "bad word token '" + tok + "'");
    char c = tok[0];
    bool inv = (c == 'X' || c == 'Y');
    bool isy = (c == 'y' || c == 'Y');
    if (c != 'x' && c != 'X' && c != 'y' && c != 'Y')
      raise(ErrorKind::SchemaError, "unknown generator in token '" + tok + "'");
    char* end = nullptr;
    long idx = std::strtol(tok.c_str() + 1, &end, 10);
    if (end == tok.c_str() + 1 || *end != '\0' || idx < 1 || idx > p.genus)
      raise(ErrorKind::SchemaError, "bad generator index in token '" + tok + "'");
    Letter l = static_cast<Letter>(2 * (idx - 1) + (isy ? 2 : 1));
    if (inv) l = static_cast<Letter>(-l);
    w.letters.push_back(l);
  }
  return w;
}

std::string format_word(const GroupWord& w) {
  std::string out;
  for (Letter l : w.letters) {
    if (!out.empty()) out += ' ';
    int idx = std::abs(static_cast<int>(l)) - 1;
    bool isy = (idx % 2 == 1);
    char c = isy ? 'y' : 'x';
    if (l < 0) c = static_cast<char>(std::toupper(c));
    out += c;
    out += std::to_string(idx / 2 + 1);
  }
  return out;
}

GroupWord reduce_word(GroupWord w) {
  std::vector<Letter> out;
  out.reserve(w.letters.size());
  for (Letter l : w.letters) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  w.letters = std::move(out);
  return w;
}

GroupWord cyclic_reduce(GroupWord w) {
  w = reduce_word(std::move(w));
  std::size_t lo = 0, hi = w.letters.size();
  while (hi - lo >= 2 && w.letters[lo] == -w.letters[hi - 1]) {
    ++lo;
    --hi;
  }
  GroupWord r;
  r.letters.assign(w.letters.begin() + static_cast<long>(lo),
                   w.letters.begin() + static_cast<long>(hi));
  return r;
}

namespace {

// Cyclic rotation starting at position i.
GroupWord rotate(const GroupWord& w, std::size_t i) {
  GroupWord r;
  r.letters.reserve(w.size());
  r.letters.insert(r.letters.end(), w.letters.begin() + static_cast<long>(i),
                   w.letters.end());
  r.letters.insert(r.letters.end(), w.letters.begin(),
                   w.letters.begin() + static_cast<long>(i));
  return r;
}

GroupWord lexmin_rotation(const GroupWord& w) {
  GroupWord best = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    GroupWord r = rotate(w, i);
    if (word_less(r, best)) best = r;
  }
  return best;
}

// All cyclic rotations of the relator and of its inverse.
struct RelatorTable {
  std::vector<GroupWord> forms;  // each of length 4g
  std::size_t half;              // 2g

  explicit RelatorTable(const SurfacePresentation& p) {
    const GroupWord r = p.relator;
    const GroupWord ri = r.inverse();
    half = r.size() / 2;
    for (std::size_t i = 0; i < r.size(); ++i) {
      forms.push_back(rotate(r, i));
      forms.push_back(rotate(ri, i));
    }
  }
};

bool matches_at(const GroupWord& cyc, std::size_t pos, const GroupWord& pat,
                std::size_t len) {
  const std::size_t n = cyc.size();
  for (std::size_t j = 0; j < len; ++j)
    if (cyc.letters[(pos + j) % n] != pat.letters[j]) return false;
  return true;
}

// Replace the length-k cyclic subword at pos by the inverse of the
// complement of `form` (form has length 4g, the subword matches its
// first k letters). Result is freely and cyclically reduced.
GroupWord apply_relator_rewrite(const GroupWord& cyc, std::size_t pos,
                                const GroupWord& form, std::size_t k) {
  const std::size_t n = cyc.size();
  GroupWord tail;  // complement of the matched piece inside the relator form
  tail.letters.assign(form.letters.begin() + static_cast<long>(k),
                      form.letters.end());
  GroupWord repl = tail.inverse();
  GroupWord out;
  out.letters = repl.letters;
  for (std::size_t j = k; j < n; ++j)
    out.letters.push_back(cyc.letters[(pos + j) % n]);
  return cyclic_reduce(out);
}

// One pass of cyclic Dehn shortening: find any cyclic subword equal to more
// than half of a relator form and replace it by the shorter complement.
// Returns nullopt when no shortening applies.
std::optional<GroupWord> dehn_shorten_once(const GroupWord& w,
                                           const RelatorTable& rel) {
  const std::size_t n = w.size();
  if (n == 0) return std::nullopt;
  const std::size_t full = rel.forms.front().size();
  std::size_t kmax = std::min(n, full - 1);
  for (std::size_t k = kmax; k > rel.half; --k) {
    for (const auto& form : rel.forms) {
      for (std::size_t pos = 0; pos < n; ++pos) {
        if (matches_at(w, pos, form, k))
          return apply_relator_rewrite(w, pos, form, k);
      }
    }
  }
  return std::nullopt;
}

GroupWord dehn_cyclic_reduce(GroupWord w, const RelatorTable& rel) {
  w = cyclic_reduce(std::move(w));
  while (true) {
    auto next = dehn_shorten_once(w, rel);
    if (!next) break;
    w = *next;
  }
  return w;
}

// Exploration cap for the exact equal-length orbit saturation. Words from
// the bounded enumeration stay far below it; very long constructed words
// (boundary powers) fall back to a deterministic greedy descent.
constexpr std::size_t kOrbitCap = 4096;

// Lex-least word in the orbit of w under rotations, inversion and
// equal-length half-relator rewrites. If a rewrite shortens the word the
// search restarts at the shorter word.
GroupWord canonical_cyclic_word(GroupWord w, const RelatorTable& rel) {
restart:
  w = dehn_cyclic_reduce(std::move(w), rel);
  if (w.empty()) return w;

  GroupWord start = lexmin_rotation(w);
  GroupWord start_inv = lexmin_rotation(w.inverse());
  if (word_less(start_inv, start)) start = start_inv;

  std::set<std::vector<Letter>> seen;
  std::deque<GroupWord> queue;
  auto push = [&](const GroupWord& g) {
    if (seen.insert(g.letters).second) queue.push_back(g);
  };
  push(start);
  GroupWord best = start;
  bool capped = false;

  while (!queue.empty()) {
    GroupWord cur = queue.front();
    queue.pop_front();
    if (word_less(cur, best)) best = cur;

    if (seen.size() > kOrbitCap) {
      capped = true;
      break;
    }
    const std::size_t n = cur.size();
    for (const auto& form : rel.forms) {
      for (std::size_t pos = 0; pos < n; ++pos) {
        if (rel.half > n) continue;
        if (!matches_at(cur, pos, form, rel.half)) continue;
        GroupWord nw = apply_relator_rewrite(cur, pos, form, rel.half);
        if (nw.size() < n) {
          w = nw;
          goto restart;
        }
        GroupWord cand = lexmin_rotation(nw);
        GroupWord cand_inv = lexmin_rotation(nw.inverse());
        if (word_less(cand_inv, cand)) cand = cand_inv;
        push(cand);
      }
    }
  }

  if (!capped) return best;

  // Greedy deterministic descent for words whose rewrite orbit is too large
  // to saturate (only reachable for long constructed words).
  while (true) {
    GroupWord improved = best;
    const std::size_t n = best.size();
    for (const auto& form : rel.forms) {
      for (std::size_t pos = 0; pos < n; ++pos) {
        if (rel.half > n || !matches_at(best, pos, form, rel.half)) continue;
        GroupWord nw = apply_relator_rewrite(best, pos, form, rel.half);
        if (nw.size() < n) {
          w = nw;
          goto restart;
        }
        GroupWord cand = lexmin_rotation(nw);
        GroupWord cand_inv = lexmin_rotation(nw.inverse());
        if (word_less(cand_inv, cand)) cand = cand_inv;
        if (word_less(cand, improved)) improved = cand;
      }
    }
    if (improved == best) break;
    best = improved;
  }
  return best;
}

const RelatorTable& relator_table(const SurfacePresentation& p) {
  // One table per genus; presentations of equal genus are identical.
  static std::vector<std::unique_ptr<RelatorTable>> tables;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  std::size_t g = static_cast<std::size_t>(p.genus);
  if (tables.size() <= g) tables.resize(g + 1);
  if (!tables[g]) tables[g] = std::make_unique<RelatorTable>(p);
  return *tables[g];
}

}  // namespace

ConjugacyClass conjugacy_canonical(const GroupWord& w,
                                   const SurfacePresentation& p) {
  const RelatorTable& rel = relator_table(p);
  GroupWord c = canonical_cyclic_word(w, rel);
  if (c.empty())
    raise(ErrorKind::TrivialWord, "word reduces to the identity: '" +
                                      format_word(w) + "'");
  ConjugacyClass cls;
  cls.canonical = c;

  // Smallest cyclic period of the canonical word.
  const std::size_t n = c.size();
  std::size_t period = n;
  for (std::size_t pcand = 1; pcand < n; ++pcand) {
    if (n % pcand != 0) continue;
    bool ok = true;
    for (std::size_t i = pcand; i < n && ok; ++i)
      ok = (c.letters[i] == c.letters[i % pcand]);
    if (ok) {
      period = pcand;
      break;
    }
  }
  if (period == n) {
    cls.primitive_root = c;
    cls.exponent = 1;
  } else {
    GroupWord root;
    root.letters.assign(c.letters.begin(),
                        c.letters.begin() + static_cast<long>(period));
    GroupWord root_canon = canonical_cyclic_word(root, rel);
    cls.primitive_root = root_canon;
    cls.exponent = static_cast<int>(n / period);
  }
  return cls;
}

ConjugacyClass class_of(const std::string& text,
                        const SurfacePresentation& p) {
  return conjugacy_canonical(parse_word(text, p), p);
}

std::pair<ConjugacyClass, int> primitive_root(const ConjugacyClass& c,
                                              const SurfacePresentation& p) {
  ConjugacyClass root = conjugacy_canonical(c.primitive_root, p);
  return {root, c.exponent};
}

std::vector<ConjugacyClass> enumerate_conjugacy_classes(
    const SurfacePresentation& p, int max_len, std::size_t class_cap) {
  if (max_len < 1) raise(ErrorKind::SchemaError, "max_len must be >= 1");
  const int ngen = p.num_generators();
  std::unordered_set<GroupWord, WordHash> canon;

  std::vector<Letter> alphabet;
  for (int i = 1; i <= ngen; ++i) {
    alphabet.push_back(static_cast<Letter>(i));
    alphabet.push_back(static_cast<Letter>(-i));
  }

  // Iterate all cyclically reduced words of each length; keep a word only if
  // it is the canonical representative of its class. A cheap pre-filter
  // (lex-least among own rotations and the inverse's) rejects most words
  // before full canonicalization.
  GroupWord buf;
  std::function<void(int, int)> dfs = [&](int len, int target) {
    if (len == target) {
      if (!buf.empty() && buf.letters.front() == -buf.letters.back()) return;
      GroupWord m = lexmin_rotation(buf);
      GroupWord mi = lexmin_rotation(buf.inverse());
      if (word_less(mi, m)) m = mi;
      if (m != buf) return;  // not the pre-filter representative
      ConjugacyClass cls = conjugacy_canonical(buf, p);
      if (static_cast<int>(cls.length()) == target) {
        canon.insert(cls.canonical);
        if (canon.size() > class_cap)
          raise(ErrorKind::BudgetExceeded,
                "conjugacy class enumeration exceeded cap of " +
                    std::to_string(class_cap));
      }
      return;
    }
    for (Letter l : alphabet) {
      if (len > 0 && buf.letters.back() == -l) continue;
      buf.letters.push_back(l);
      dfs(len + 1, target);
      buf.letters.pop_back();
    }
  };

  for (int target = 1; target <= max_len; ++target) dfs(0, target);

  std::vector<ConjugacyClass> out;
  out.reserve(canon.size());
  for (const auto& w : canon) out.push_back(conjugacy_canonical(w, p));
  std::sort(out.begin(), out.end(), class_less);
  return out;
}

}  // namespace currents
