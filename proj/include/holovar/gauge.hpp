#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "holovar/config.hpp"
#include "holovar/groups.hpp"
#include "holovar/variety.hpp"

namespace holovar {

// An element k = (g1, g2) of K = G x G.
struct GaugePair {
  GroupElement g1;
  GroupElement g2;
};

GaugePair identity_gauge_pair(const GroupId& group);
GaugePair haar_gauge_pair(const GroupId& group, std::uint64_t seed);
// (g1, g2)(h1, h2) = (g1 h1, g2 h2).
GaugePair compose(const GaugePair& outer, const GaugePair& inner);

// The K-action: conjugation by g1 on the plus block and by g2 on the minus
// block, with c -> g1 c g2^{-1} and c' -> g2 c' g1^{-1}.
DoubledTuple apply_action(const GaugePair& k, const DoubledTuple& x);

// The diagonal conjugation action on one-basepoint tuples.
NTuple apply_diagonal_action(const GroupElement& g, const NTuple& x);

// Traces of all words in the entries and their inverses up to the length
// bound, enumerated by length and then lexicographically in the letter
// alphabet (entry 0..m-1, then inverse 0..m-1).  Invariant under simultaneous
// conjugation.
std::vector<Complex> word_trace_invariants(std::span<const GroupElement> entries,
                                           int max_word_length);
std::vector<Complex> word_trace_invariants(const NTuple& x, int max_word_length = 3);

// Sup-norm distance between invariant lists.
double invariant_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

struct AlignOptions {
  int restarts = 20;
  int max_iters = 500;
  int max_word_length = 3;
  bool quick_reject = true;
  Tolerances tol;
};

struct AlignmentResult {
  bool found = false;
  std::vector<GroupElement> witness;  // one element (diagonal) or two (K)
  double residual = 0.0;
  int starts_used = 0;
};

// Searches for g with g x g^{-1} = y.  A word-trace mismatch is a trustworthy
// negative certificate; an unconverged optimization is only evidence.
AlignmentResult align_conjugation(const NTuple& x, const NTuple& y, std::uint64_t seed,
                                  const AlignOptions& opts = {},
                                  std::span<const GroupElement> hints = {});

// Same, on bare entry lists (used for block-level alignment).
AlignmentResult align_entries_conjugation(std::span<const GroupElement> x,
                                          std::span<const GroupElement> y,
                                          const GroupId& group, std::uint64_t seed,
                                          const AlignOptions& opts = {},
                                          std::span<const GroupElement> hints = {});

// Searches for k = (g1, g2) with k . x = y under the two-basepoint action.
AlignmentResult align_two_basepoint(const DoubledTuple& x, const DoubledTuple& y,
                                    std::uint64_t seed, const AlignOptions& opts = {},
                                    std::span<const GaugePair> hints = {});

// Dimension of the simultaneous commutant {xi : Ad_{x_i} xi = xi} (diagonal
// case) or of the Lie-algebra stabilizer of the K-action (doubled case),
// by singular-value thresholding.
int stabilizer_dimension(std::span<const GroupElement> entries,
                         double sigma_tol = Tolerances{}.sigma_tol);
int stabilizer_dimension(const NTuple& x, double sigma_tol = Tolerances{}.sigma_tol);
int stabilizer_dimension(const DoubledTuple& x, double sigma_tol = Tolerances{}.sigma_tol);

// Numerical genericity proxy: zero-dimensional stabilizer.  Discrete
// non-central stabilizers are not detected here; the exact finite-group
// oracle covers that gap.
bool is_generic(const NTuple& x, double sigma_tol = Tolerances{}.sigma_tol);
bool is_generic(const DoubledTuple& x, double sigma_tol = Tolerances{}.sigma_tol);

}  // namespace holovar
