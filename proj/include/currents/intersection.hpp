#pragma once

#include <cstdint>
#include <utility>

#include "currents/hyperbolic.hpp"
#include "currents/words.hpp"

namespace currents {

struct LinkingBudget {
  // Cap on conjugator word length; <= 0 derives the default from the pair
  // (word length of a + b + 8, with a structure-aware floor so the corridor
  // enumeration can reach every relevant double coset).
  int max_conjugator_len = -1;
  // Consecutive budget increments with unchanged count required to accept
  // when the cap is reached before the corridor is exhausted.
  int stabilization_window = 2;
  // Extra radius added to the geometric keep-distance when expanding the
  // search; covers quasi-geodesic wander of word paths.
  double expansion_slack = 4.0;
};

// Geometric intersection number of the two classes, with the bilinear
// current convention on powers: i(r^m, s^n) = m n i(r, s), and i(c, c) equal
// to the self-intersection number of the primitive root scaled accordingly.
std::int64_t geometric_intersection(const HyperbolicStructure& s,
                                    const ConjugacyClass& a,
                                    const ConjugacyClass& b,
                                    const LinkingBudget& budget = {});

// Minimal self-intersection number of the free homotopy class: crossings of
// distinct axis lifts in one period, with k parallel strands of a k-th power
// contributing k-1 extra crossings.
std::int64_t self_intersection(const HyperbolicStructure& s,
                               const ConjugacyClass& a,
                               const LinkingBudget& budget = {});

bool is_simple(const HyperbolicStructure& s, const ConjugacyClass& a,
               const LinkingBudget& budget = {});

// Drops all memoized intersection results (mainly for tests).
void clear_intersection_cache();

namespace detail {

// Raw count of linking double cosets: conjugates of b's primitive root whose
// axis crosses one fundamental period of the axis of a's canonical word.
// Exposed so tests can check the symmetry of the construction directly;
// the public API is free to swap the roles of a and b.
std::int64_t linking_event_count(const HyperbolicStructure& s,
                                 const ConjugacyClass& a,
                                 const ConjugacyClass& b,
                                 const LinkingBudget& budget);

}  // namespace detail

}  // namespace currents
