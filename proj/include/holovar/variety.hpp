#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "holovar/config.hpp"
#include "holovar/groups.hpp"

namespace holovar {

enum class SurfaceKind { RP2Sum, KleinSum, Orientable };

std::string surface_kind_name(SurfaceKind k);
SurfaceKind parse_surface_kind(const std::string& name);

// Topological type of the base surface: the connected sum of a genus-ell
// surface with RP^2 or a Klein bottle, or an orientable surface of genus ell.
struct SurfacePresentation {
  SurfaceKind kind;
  int ell;

  SurfacePresentation(SurfaceKind k, int l);

  bool orientable() const { return kind == SurfaceKind::Orientable; }
  // Holonomy entries of a one-basepoint tuple: (a_i, b_i, c), (a_i, b_i, d, c)
  // or (a_i, b_i).
  int entry_count() const;
  std::string label() const;

  friend bool operator==(const SurfacePresentation& a, const SurfacePresentation& b) {
    return a.kind == b.kind && a.ell == b.ell;
  }
};

// Genus 2*ell (RP^2 case) or 2*ell + 1 (Klein case) orientable double cover.
SurfacePresentation double_cover(const SurfacePresentation& s);

// One-basepoint holonomy tuple.  The twist is a central element: the set N_r
// it samples from for nonorientable kinds, or the central relation target for
// orientable tuples.
struct NTuple {
  SurfacePresentation surface;
  GroupId group;
  std::vector<GroupElement> entries;
  GroupElement twist;
};

// Two-basepoint tuple (V, c) at P+ and (V', c') at P- on the double cover.
struct DoubledTuple {
  SurfacePresentation surface;  // the nonorientable base, not the cover
  GroupId group;
  std::vector<GroupElement> plus_entries;
  std::vector<GroupElement> minus_entries;
};

// Sum of Frobenius norms of (LHS)*(RHS)^{-1} - I over the relations that
// apply to the tuple kind; products run left to right in ascending i.
double relation_residual(const NTuple& x);
double relation_residual(const DoubledTuple& x);

// Aggregate Frobenius distance between same-shape tuples.
double tuple_distance(const NTuple& a, const NTuple& b);
double tuple_distance(const DoubledTuple& a, const DoubledTuple& b);

// (V, c) -> (V, c, V, c r); lands on the doubled variety because r is
// central.  Throws OffVarietyError when x does not satisfy its relation.
DoubledTuple diagonal_embed(const NTuple& x, const Tolerances& tol = {});

struct SampleOptions {
  int max_attempts = 20;
  int restarts = 20;
  int max_iters = 500;
  Tolerances tol;
};

// Random on-variety point of N_r.  RP^2 case: Haar (a_i, b_i) and c from the
// principal square root, resampling on branch cuts.  Klein case: the last
// commutator is solved for; ell = 0 falls back to a direct Riemannian solve.
NTuple sample_point(const SurfacePresentation& surface, const GroupId& group,
                    const GroupElement& twist, std::uint64_t seed,
                    const SampleOptions& opts = {});

struct CommutatorSolveOptions {
  int restarts = 20;
  int max_iters = 500;
  double accept = Tolerances{}.eps_rel;
};

// (a, b) with a b a^{-1} b^{-1} = w, by multi-start Riemannian
// Gauss-Newton/Levenberg-Marquardt.  Throws NoConvergenceError.
std::pair<GroupElement, GroupElement> solve_commutator(
    const GroupElement& w, std::uint64_t seed, const CommutatorSolveOptions& opts = {});

// Newton polish on the relation map down to tol; requires a residual below
// 0.1 to start from.
NTuple refine(const NTuple& x, double tol);
DoubledTuple refine(const DoubledTuple& x, double tol);

}  // namespace holovar
