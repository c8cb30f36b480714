#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holovar/config.hpp"
#include "holovar/gauge.hpp"
#include "holovar/groups.hpp"
#include "holovar/variety.hpp"

namespace holovar {

// The deck involution on two-basepoint tuples: swap the blocks.
DoubledTuple tau_point(const DoubledTuple& x);

// The involution on K: (g1, g2) -> (g2, g1).
GaugePair tau_gauge(const GaugePair& k);

// A class in Z(G)/2Z(G), carried with enough context to render it.
struct CenterQuotientClass {
  GroupId group;
  int class_index = 0;
  int num_classes = 1;
  int representative = 0;  // index into the center table

  friend bool operator==(const CenterQuotientClass& a, const CenterQuotientClass& b) {
    return a.group == b.group && a.class_index == b.class_index;
  }
};

CenterQuotientClass twist_class(const CenterTable& table, const GroupElement& r);

// A certified solution of k . x = tau(x): the pair k, the extracted central
// twist r = (g2 g1)^{-1} snapped to the center table, and the residual of the
// re-validated alignment.
struct FixedClassWitness {
  GaugePair k;
  GroupElement twist;
  int twist_index = 0;
  double residual = 0.0;
};

struct WitnessOptions {
  AlignOptions align;
  Tolerances tol;
};

// Decides whether [x] is tau-fixed.  The structured search first aligns the
// plus V-block onto the minus block, derives g2 from the arc equation, then
// re-polishes with g2 constrained to r^{-1} g1^{-1} for the snapped twist.
// Returns nullopt when no witness is found; throws NonCentralTwistError when
// an alignment succeeds but the twist refuses to snap to the center.
std::optional<FixedClassWitness> find_fixed_witness(const DoubledTuple& x,
                                                    const CenterTable& table,
                                                    std::uint64_t seed,
                                                    const WitnessOptions& opts = {});

// Gauges a tau-fixed x into N_r form (V, c', V, c' r) and returns the
// one-basepoint tuple (V, c') with twist r; verifies that its diagonal embed
// is K-equivalent to x.  Throws NormalizationFailedError if that fails.
NTuple normalize_to_Nr(const DoubledTuple& x, const FixedClassWitness& witness,
                       std::uint64_t seed, const WitnessOptions& opts = {});

// The comparison map on points: the diagonal embed of a twist-e tuple.
DoubledTuple map_I(const NTuple& x, const Tolerances& tol = {});

// Outcome of enumerating the fiber of I over [diagonal_embed(x)]: the
// candidate set {(V, c s) : s^2 = e} deduplicated by diagonal alignment.
struct FiberReport {
  std::vector<NTuple> classes;      // one representative per surviving class
  std::vector<int> candidate_sqrt;  // center indices s of the candidates
  int degree = 0;
  bool countable = true;  // false when invariant separation was inconclusive
  // One record per unordered candidate pair: "trace-reject", "aligned" or
  // "ambiguous", with the metric that decided it.
  std::vector<std::string> dedup_evidence;
  double max_embed_defect = 0.0;  // worst K-equivalence check of a candidate
  int align_starts_total = 0;     // optimizer starts spent on deduplication
};

struct FiberOptions {
  AlignOptions align;
  Tolerances tol;
};

FiberReport fiber_of_I(const NTuple& x, const CenterTable& table, std::uint64_t seed,
                       const FiberOptions& opts = {});

// Change of model from two basepoints to one: genus-2*ell orientable tuple
// (a_1, b_1, ..., a_l, b_l, c'^{-1} b'_l c', c'^{-1} a'_l c', ..., c'^{-1} b'_1 c',
// c'^{-1} a'_1 c').  RP^2 case only.
NTuple phi_map(const DoubledTuple& x, const Tolerances& tol = {});

// A tuple over G taken modulo per-entry central factors, stored via a
// canonical representative (first maximal-modulus entry gets phase in
// [0, 2*pi/|Z|)).
struct CosetTuple {
  NTuple representative;
  GroupId group() const { return representative.group; }
};

CosetTuple project_center(const NTuple& x, const CenterTable& table);
bool coset_equal(const CosetTuple& a, const CosetTuple& b, double eps = 1e-8);

// The central defect of the relation evaluated on the (arbitrary) lifts in
// the canonical representative.  Orientable: the element of Z(G) itself
// (lift-independent).  Nonorientable: only the class mod squares is
// well-defined, because re-lifting c shifts the defect by a square.
struct Obstruction {
  GroupElement element;
  int center_index = 0;
  CenterQuotientClass quotient_class;
  bool class_valued = false;  // true for nonorientable bases
};

Obstruction lift_and_obstruct(const CosetTuple& h, const SurfacePresentation& surface,
                              const CenterTable& table, const Tolerances& tol = {});

// Product of commutators of the one-basepoint image of the doubled tuple:
// prod_i [a_i, b_i] * prod_{i=l..1} [c^{-1} b_i c, c^{-1} a_i c]; equals the
// identity for every on-variety RP^2 tuple, whatever the twist.
bool verify_lift_commutator_identity(const NTuple& x,
                                     double eps_rel = Tolerances{}.eps_rel);

}  // namespace holovar
