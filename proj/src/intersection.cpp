#include "currents/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "currents/errors.hpp"

namespace currents {

namespace {

constexpr double kLinkTol = 1e-9;

struct AxisData {
  Isometry m;           // holonomy, possibly pulled toward the basepoint
  double rep, attr;     // axis endpoints
  double len;           // translation length
  double dist_to_base;  // d(basepoint, axis)
};

AxisData axis_data(const Isometry& m, double tol) {
  AxisData d;
  d.m = m;
  auto [r, a] = axis_endpoints(m, tol);
  d.rep = r;
  d.attr = a;
  d.len = translation_length(m, tol);
  d.dist_to_base =
      distance_to_geodesic(HyperbolicStructure::basepoint(), r, a);
  return d;
}

// Conjugates m by short products of generators to bring its axis close to
// the basepoint. Greedy descent; the class is unchanged.
Isometry pull_axis_close(const HyperbolicStructure& s, Isometry m) {
  auto dist = [&](const Isometry& g) {
    auto [r, a] = axis_endpoints(g, s.tolerance);
    return distance_to_geodesic(HyperbolicStructure::basepoint(), r, a);
  };
  double best = dist(m);
  for (int iter = 0; iter < 500; ++iter) {
    Isometry best_m = m;
    double best_d = best;
    for (int id = 1; id <= s.presentation.num_generators(); ++id) {
      const Isometry& g = s.generator(id);
      for (int sign = 0; sign < 2; ++sign) {
        Isometry u = sign ? g.inverse() : g;
        Isometry cand = u * m * u.inverse();
        double d = dist(cand);
        if (d < best_d - 1e-9) {
          best_d = d;
          best_m = cand;
        }
      }
    }
    if (best_d > best - 0.05) break;
    best = best_d;
    m = best_m;
  }
  return m;
}

// Quantized visited-set for group elements in the normalized frame.
struct ElementSet {
  std::unordered_map<std::uint64_t, std::vector<Isometry>> buckets;

  static Isometry sign_fixed(const Isometry& m) {
    double v = m.a;
    double best = std::abs(m.a);
    if (std::abs(m.b) > best) best = std::abs(m.b), v = m.b;
    if (std::abs(m.c) > best) best = std::abs(m.c), v = m.c;
    if (std::abs(m.d) > best) best = std::abs(m.d), v = m.d;
    if (v < 0) return {-m.a, -m.b, -m.c, -m.d};
    return m;
  }

  static std::uint64_t key(const Isometry& m) {
    auto q = [](double x) {
      return static_cast<std::uint64_t>(
          static_cast<std::int64_t>(std::llround(x * 262144.0)));
    };
    std::uint64_t h = 1469598103934665603ull;
    for (double x : {m.a, m.b, m.c, m.d}) {
      h ^= q(x);
      h *= 1099511628211ull;
    }
    return h;
  }

  // Returns true if the element was new.
  bool insert(const Isometry& raw) {
    Isometry m = sign_fixed(raw);
    auto& vec = buckets[key(m)];
    for (const auto& other : vec)
      if (matrices_close(m, other, 1e-6)) return false;
    vec.push_back(m);
    return true;
  }
};

struct Corridor {
  const HyperbolicStructure& s;
  AxisData a;    // the period axis (full word of the first class)
  AxisData b;    // primitive root of the second class (conjugated side)
  bool self_mode;

  Isometry frame;        // maps axis(a) to (0,inf), foot of basepoint to i
  Isometry frame_inv;
  std::complex<double> base_n;  // basepoint in normalized frame
  double la;

  double r_keep, r_expand;
  std::vector<Isometry> gen_steps;  // generators and inverses, original frame

  std::vector<Isometry> event_reps;  // normalized-frame, period-reduced

  Corridor(const HyperbolicStructure& st, const AxisData& ad,
           const AxisData& bd, bool self, double slack)
      : s(st), a(ad), b(bd), self_mode(self) {
    frame = frame_for_axis(a.rep, a.attr, HyperbolicStructure::basepoint());
    frame_inv = frame.inverse();
    base_n = frame.apply(HyperbolicStructure::basepoint());
    la = a.len;
    r_keep = b.dist_to_base + b.len + 0.25;
    r_expand = r_keep + slack;
    for (int id = 1; id <= s.presentation.num_generators(); ++id) {
      gen_steps.push_back(s.generator(id));
      gen_steps.push_back(s.generator(id).inverse());
    }
  }

  // Distance from a normalized-frame point to the period segment, together
  // with the leg back to the basepoint (keeps the search region connected).
  double prune_distance(std::complex<double> z) const {
    double t = 0.5 * std::log(std::norm(z));
    double dseg;
    if (t >= 0 && t <= la) {
      dseg = std::asinh(std::abs(z.real()) / z.imag());
    } else {
      double tc = std::clamp(t, 0.0, la);
      std::complex<double> endpoint(0, std::exp(tc));
      dseg = hyperbolic_distance(z, endpoint);
    }
    return std::min(dseg, hyperbolic_distance(z, base_n));
  }

  // Tests one conjugator (given as its normalized-frame matrix W = F*w) and
  // records a new double coset when its conjugated axis crosses the period.
  void test_event(const Isometry& w_n) {
    double e1 = w_n.apply_boundary(b.rep);
    double e2 = w_n.apply_boundary(b.attr);
    double ip = inversive_product(0, kBoundaryInfinity, e1, e2);
    if (std::abs(ip - 1) <= kLinkTol) {
      // Shared axis or precision exhaustion: decide by exact commutation.
      Isometry w = frame_inv * w_n;
      Isometry conj = w * b.m * w.inverse();
      Isometry lhs = conj * a.m;
      Isometry rhs = a.m * conj;
      if (matrices_close(lhs, rhs, 1e-6)) return;  // shared axis, no crossing
      raise(ErrorKind::DegenerateLinking,
            "axis endpoints coincide within tolerance for a non-commuting "
            "conjugate");
    }
    if (ip >= 1) return;  // disjoint axes
    // Crossing: reduce the crossing height into the fundamental period.
    double t = 0.5 * std::log(-e1 * e2);
    double k = std::floor(t / la);
    Isometry shift = Isometry::translation_along_vertical(-k * la);
    Isometry rep = shift * w_n;
    // Dedup against accepted events modulo <a> on the left (one extra period
    // shift can appear at the period boundary) and <b_root> on the right.
    for (const auto& other : event_reps)
      if (same_coset(other, rep)) return;
    event_reps.push_back(rep);
  }

  bool same_coset(const Isometry& w1_n, const Isometry& w2_n) const {
    for (int delta = -1; delta <= 1; ++delta) {
      Isometry t = w1_n.inverse() *
                   Isometry::translation_along_vertical(delta * la) * w2_n;
      // t is the original-frame matrix of w1^{-1} a^delta w2; test whether
      // it is a power of the conjugated root.
      double tr = std::abs(t.trace());
      int m_est = 0;
      if (tr > 2)
        m_est = static_cast<int>(std::lround(2 * std::acosh(tr / 2) / b.len));
      if (m_est == 0) {
        if (is_plus_minus_identity(t, 1e-5)) return true;
        continue;
      }
      if (m_est > 400) continue;
      Isometry pw = Isometry::identity();
      for (int i = 0; i < m_est; ++i) pw = pw * b.m;
      if (matrices_close(t, pw, 1e-5 * std::max(1.0, std::abs(pw.trace()))))
        return true;
      Isometry pwi = pw.inverse();
      if (matrices_close(t, pwi, 1e-5 * std::max(1.0, std::abs(pw.trace()))))
        return true;
    }
    return false;
  }

  // Breadth-first enumeration over conjugators; layers are word lengths.
  // Returns the number of distinct linking double cosets.
  std::int64_t run(int max_len, int window) {
    ElementSet visited;
    std::deque<std::pair<Isometry, int>> queue;  // (F*w, word length)
    Isometry start = frame;
    visited.insert(start);
    test_event(start);
    queue.emplace_back(start, 0);

    int current_layer = 0;
    std::vector<std::int64_t> layer_counts;
    while (!queue.empty()) {
      auto [w_n, len] = queue.front();
      queue.pop_front();
      if (len > current_layer) {
        layer_counts.push_back(static_cast<std::int64_t>(event_reps.size()));
        current_layer = len;
      }
      if (len >= max_len) {
        // Cap reached with work remaining: accept only a stabilized count.
        layer_counts.push_back(static_cast<std::int64_t>(event_reps.size()));
        int n = static_cast<int>(layer_counts.size());
        bool stable = n > window;
        for (int i = 0; stable && i < window; ++i)
          stable = (layer_counts[static_cast<std::size_t>(n - 1 - i)] ==
                    layer_counts[static_cast<std::size_t>(n - 2 - i)]);
        if (stable) return static_cast<std::int64_t>(event_reps.size());
        raise(ErrorKind::Unstable,
              "linking count still changing at conjugator budget " +
                  std::to_string(max_len));
      }
      std::complex<double> z = w_n.apply(HyperbolicStructure::basepoint());
      if (prune_distance(z) > r_expand) continue;
      for (const auto& g : gen_steps) {
        Isometry child = w_n * g;
        if (!visited.insert(child)) continue;
        test_event(child);
        queue.emplace_back(child, len + 1);
      }
    }
    return static_cast<std::int64_t>(event_reps.size());
  }
};

struct PairKey {
  GroupWord a, b;
  bool operator==(const PairKey& o) const { return a == o.a && b == o.b; }
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    return WordHash{}(k.a) * 1000003u ^ WordHash{}(k.b);
  }
};

struct StructureCache {
  std::mutex mu;
  std::unordered_map<PairKey, std::int64_t, PairKeyHash> pair_values;
  std::unordered_map<GroupWord, std::int64_t, WordHash> self_values;
};

struct CacheRegistry {
  std::mutex mu;
  std::map<std::string, std::unique_ptr<StructureCache>> caches;
};

CacheRegistry& cache_registry() {
  static CacheRegistry r;
  return r;
}

StructureCache& cache_for(const std::string& label) {
  CacheRegistry& r = cache_registry();
  std::lock_guard<std::mutex> lock(r.mu);
  auto& slot = r.caches[label];
  if (!slot) slot = std::make_unique<StructureCache>();
  return *slot;
}

int derived_budget(const HyperbolicStructure& s, const AxisData& a,
                   const AxisData& b, std::size_t wa, std::size_t wb) {
  double min_gen = std::numeric_limits<double>::infinity();
  for (int id = 1; id <= s.presentation.num_generators(); ++id)
    min_gen = std::min(min_gen, translation_length(s.generator(id),
                                                   s.tolerance));
  double r_keep = b.dist_to_base + b.len + 0.25;
  double diameter = a.len + 2 * (r_keep + 6.0) + 2 * a.dist_to_base;
  int floor_len = static_cast<int>(std::ceil(diameter / min_gen)) + 8;
  int spec_default = static_cast<int>(wa + wb) + 8;
  return std::max(spec_default, floor_len);
}

// Count of linking double cosets for the period of `period_word` against
// conjugates of the primitive-root matrix of `conj_class`.
std::int64_t corridor_count(const HyperbolicStructure& s,
                            const GroupWord& period_word,
                            const GroupWord& conj_root_word, bool self_mode,
                            const LinkingBudget& budget) {
  Isometry ma = pull_axis_close(s, s.holonomy(period_word));
  AxisData a = axis_data(ma, s.tolerance);
  Isometry mb;
  if (self_mode) {
    // Same axis family: express the root in the pulled frame of the word.
    // The pulled conjugation is unknown as a word, but the root of the
    // pulled matrix is the pulled root: recover it by matching translation
    // lengths along the same axis.
    double lroot = translation_length(s.holonomy(conj_root_word), s.tolerance);
    int k = static_cast<int>(std::lround(a.len / lroot));
    if (k <= 0) k = 1;
    // k-th root of ma along its axis: conjugate to diagonal, take root.
    Isometry f = frame_for_axis(a.rep, a.attr, HyperbolicStructure::basepoint());
    Isometry d = f * ma * f.inverse();
    // d is +-diag(e^{la/2}, e^{-la/2}) up to numeric residue; its exact k-th
    // root along the axis is the diagonal translation.
    Isometry root_n = Isometry::translation_along_vertical(a.len / k);
    mb = f.inverse() * root_n * f;
    (void)d;
  } else {
    mb = pull_axis_close(s, s.holonomy(conj_root_word));
  }
  AxisData b = axis_data(mb, s.tolerance);

  int cap = budget.max_conjugator_len > 0
                ? budget.max_conjugator_len
                : derived_budget(s, a, b, period_word.size(),
                                 conj_root_word.size());
  Corridor corridor(s, a, b, self_mode, budget.expansion_slack);
  return corridor.run(cap, std::max(1, budget.stabilization_window));
}

// Checks the combinatorial root against translation lengths; a mismatch
// means the canonical form machinery failed.
void check_root_consistency(const HyperbolicStructure& s,
                            const ConjugacyClass& c) {
  double lw = translation_length(s.holonomy(c.canonical), s.tolerance);
  double lr = translation_length(s.holonomy(c.primitive_root), s.tolerance);
  double expect = lr * c.exponent;
  if (std::abs(lw - expect) > 1e-6 * std::max(1.0, lw))
    raise(ErrorKind::Internal,
          "primitive root disagrees with translation length for class " +
              format_word(c.canonical));
}

std::int64_t self_count_raw(const HyperbolicStructure& s,
                            const ConjugacyClass& a,
                            const LinkingBudget& budget) {
  auto& cache = cache_for(s.label);
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    auto it = cache.self_values.find(a.canonical);
    if (it != cache.self_values.end()) return it->second;
  }
  check_root_consistency(s, a);
  std::int64_t events =
      corridor_count(s, a.canonical, a.primitive_root, true, budget);
  std::int64_t k = a.exponent;
  if ((k * events) % 2 != 0)
    raise(ErrorKind::DegenerateLinking,
          "odd crossing-event count for " + format_word(a.canonical));
  std::int64_t si = (k * events) / 2 + (k - 1);
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    cache.self_values.emplace(a.canonical, si);
  }
  return si;
}

}  // namespace

namespace detail {

std::int64_t linking_event_count(const HyperbolicStructure& s,
                                 const ConjugacyClass& a,
                                 const ConjugacyClass& b,
                                 const LinkingBudget& budget) {
  return corridor_count(s, a.canonical, b.primitive_root, false, budget);
}

}  // namespace detail

std::int64_t self_intersection(const HyperbolicStructure& s,
                               const ConjugacyClass& a,
                               const LinkingBudget& budget) {
  return self_count_raw(s, a, budget);
}

bool is_simple(const HyperbolicStructure& s, const ConjugacyClass& a,
               const LinkingBudget& budget) {
  return self_intersection(s, a, budget) == 0;
}

std::int64_t geometric_intersection(const HyperbolicStructure& s,
                                    const ConjugacyClass& a,
                                    const ConjugacyClass& b,
                                    const LinkingBudget& budget) {
  SurfacePresentation p = s.presentation;
  auto [ra, m] = primitive_root(a, p);
  auto [rb, n] = primitive_root(b, p);

  if (ra == rb) {
    // Same primitive geodesic: the current pairing scales the root's
    // self-intersection number.
    std::int64_t si0 = self_count_raw(s, ra, budget);
    return static_cast<std::int64_t>(m) * n * si0;
  }

  PairKey key{ra.canonical, rb.canonical};
  if (word_less(key.b, key.a)) std::swap(key.a, key.b);
  auto& cache = cache_for(s.label);
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    auto it = cache.pair_values.find(key);
    if (it != cache.pair_values.end())
      return static_cast<std::int64_t>(m) * n * it->second;
  }

  check_root_consistency(s, a);
  check_root_consistency(s, b);

  // Enumerate conjugates of whichever root promises the smaller corridor.
  AxisData da = axis_data(pull_axis_close(s, s.holonomy(ra.canonical)),
                          s.tolerance);
  AxisData db = axis_data(pull_axis_close(s, s.holonomy(rb.canonical)),
                          s.tolerance);
  auto cost = [](const AxisData& period, const AxisData& conj) {
    double r = conj.dist_to_base + conj.len;
    return (period.len + 2 * r) * std::exp(r);
  };
  std::int64_t count;
  if (cost(da, db) <= cost(db, da))
    count = corridor_count(s, ra.canonical, rb.canonical, false, budget);
  else
    count = corridor_count(s, rb.canonical, ra.canonical, false, budget);

  {
    std::lock_guard<std::mutex> lock(cache.mu);
    cache.pair_values.emplace(key, count);
  }
  return static_cast<std::int64_t>(m) * n * count;
}

void clear_intersection_cache() {
  CacheRegistry& r = cache_registry();
  std::lock_guard<std::mutex> lock(r.mu);
  for (auto& [label, cache] : r.caches) {
    std::lock_guard<std::mutex> inner(cache->mu);
    cache->pair_values.clear();
    cache->self_values.clear();
  }
}

}  // namespace currents
