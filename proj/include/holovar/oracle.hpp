#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "holovar/variety.hpp"

namespace holovar {

// A small finite group given by its multiplication table, with the center
// data mirroring CenterTable.  Everything is verified exhaustively at
// construction.  Index 0 is the identity.
struct FiniteGroup {
  std::string name;
  int order = 0;
  std::vector<std::uint8_t> table;    // table[a * order + b] = a b
  std::vector<std::uint8_t> inverse;
  std::vector<int> center;            // sorted element indices
  std::vector<int> two_center;        // {z^2 : z in center}, sorted
  std::vector<std::vector<int>> center_quotient_classes;  // class 0 holds e
  std::vector<int> center_class_of;   // element index -> class, -1 off-center
  std::vector<int> sqrt_of_identity_in_center;

  int mul(int a, int b) const { return table[a * order + b]; }
  int inv(int a) const { return inverse[a]; }
  bool is_central(int a) const { return center_class_of[a] >= 0; }
};

enum class BuiltinGroup { Q8, D4, S3, Z4, Z3, Z2xZ2 };

std::string builtin_group_name(BuiltinGroup g);
BuiltinGroup parse_builtin_group(const std::string& name);
FiniteGroup builtin_group(BuiltinGroup g);
// Verifies associativity, identity, inverses and computes the center data.
FiniteGroup make_finite_group(std::string name, int order, std::vector<std::uint8_t> table);

struct FiniteTuple {
  SurfacePresentation surface;
  std::vector<std::uint8_t> entries;
  std::uint8_t twist = 0;
};

// All one-basepoint tuples satisfying the relation exactly, in increasing
// lexicographic order.  Guard: order^entries <= 10^8.
std::vector<FiniteTuple> enumerate_solutions(const FiniteGroup& g,
                                             const SurfacePresentation& surface,
                                             int twist);

enum class OrbitAction { KFull, KTauDiagonal };

struct FiniteOrbit {
  std::vector<int> member_indices;   // into the input solution list
  long orbit_size = 0;               // full orbit size in tuple space
  std::uint64_t canonical_key = 0;   // lexicographically minimal representative
};

// Partition of the solutions under simultaneous conjugation
// (KTauDiagonal) or under the two-basepoint K-action on their diagonal
// embeds (KFull).  Orbits are sorted by canonical representative.
std::vector<FiniteOrbit> orbit_decomposition(const FiniteGroup& g,
                                             const std::vector<FiniteTuple>& solutions,
                                             OrbitAction action);

// Ground truth for the degree statement over a finite group: the doubled
// solution set M is enumerated, decomposed into K-orbits, and the fiber of I
// is counted exactly over every tau-fixed orbit whose stabilizer is the
// diagonal center.
struct ExactFiberReport {
  std::string group;
  SurfacePresentation surface{SurfaceKind::RP2Sum, 0};
  long doubled_solutions = 0;  // |M|
  int orbit_count = 0;
  int fixed_orbit_count = 0;
  int generic_fixed_orbit_count = 0;
  int predicted_degree = 0;  // |Z(G)/2Z(G)|

  struct PerClass {
    int class_index = 0;
    std::vector<int> twist_members;         // center element indices in the class
    std::vector<long> solutions_per_twist;  // |N_r| per member
    std::vector<int> fixed_generic_orbits;  // orbit ids of P([r]) cap generic fixed
    std::vector<int> all_orbit_ids;         // orbit ids of P([r])
    bool members_agree = true;  // P(N_r1) == P(N_r2) inside the class (double inclusion)
  };
  std::vector<PerClass> per_class;

  std::map<int, int> fiber_histogram;  // degree -> count over P([e]) generic fixed
  bool partition_disjoint = true;      // distinct classes meet no common generic orbit
  bool covered = true;                 // generic fixed orbits all lie in some P([r])
  bool degrees_match_prediction = true;
  std::vector<int> defect_orbits;      // generic fixed orbits missing from P([e])
};

ExactFiberReport exact_fiber_degree(const FiniteGroup& g, const SurfacePresentation& surface,
                                    long search_guard = 100000000L);

}  // namespace holovar
