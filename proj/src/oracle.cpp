#include "holovar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

#include "holovar/errors.hpp"

namespace holovar {

namespace {

void verify_group(const FiniteGroup& g) {
  const int n = g.order;
  if (n <= 0 || static_cast<int>(g.table.size()) != n * n) {
    throw Error("finite group: malformed table");
  }
  for (int a = 0; a < n; ++a) {
    if (g.mul(0, a) != a || g.mul(a, 0) != a) throw Error("finite group: 0 is not an identity");
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (g.mul(a, b) >= n) throw Error("finite group: entry out of range");
      for (int c = 0; c < n; ++c) {
        if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c))) {
          throw Error("finite group: associativity fails");
        }
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    if (g.mul(a, g.inv(a)) != 0 || g.mul(g.inv(a), a) != 0) {
      throw Error("finite group: inverse table is wrong");
    }
  }
}

}  // namespace

FiniteGroup make_finite_group(std::string name, int order, std::vector<std::uint8_t> table) {
  FiniteGroup g;
  g.name = std::move(name);
  g.order = order;
  g.table = std::move(table);
  g.inverse.assign(order, 0);
  for (int a = 0; a < order; ++a) {
    bool found = false;
    for (int b = 0; b < order; ++b) {
      if (g.mul(a, b) == 0) {
        g.inverse[a] = static_cast<std::uint8_t>(b);
        found = true;
        break;
      }
    }
    if (!found) throw Error("finite group: element without inverse");
  }
  verify_group(g);
  for (int a = 0; a < order; ++a) {
    bool central = true;
    for (int b = 0; b < order && central; ++b) {
      central = g.mul(a, b) == g.mul(b, a);
    }
    if (central) g.center.push_back(a);
  }
  for (int z : g.center) {
    const int sq = g.mul(z, z);
    if (std::find(g.two_center.begin(), g.two_center.end(), sq) == g.two_center.end()) {
      g.two_center.push_back(sq);
    }
    if (sq == 0) g.sqrt_of_identity_in_center.push_back(z);
  }
  std::sort(g.two_center.begin(), g.two_center.end());
  g.center_class_of.assign(order, -1);
  for (int z : g.center) {
    if (g.center_class_of[z] >= 0) continue;
    const int cls = static_cast<int>(g.center_quotient_classes.size());
    std::vector<int> members;
    for (int t : g.two_center) {
      const int zt = g.mul(z, t);
      if (g.center_class_of[zt] < 0) {
        g.center_class_of[zt] = cls;
        members.push_back(zt);
      }
    }
    std::sort(members.begin(), members.end());
    g.center_quotient_classes.push_back(std::move(members));
  }
  return g;
}

namespace {

std::vector<std::uint8_t> cyclic_table(int n) {
  std::vector<std::uint8_t> t(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a * n + b] = static_cast<std::uint8_t>((a + b) % n);
  return t;
}

std::vector<std::uint8_t> klein_four_table() {
  std::vector<std::uint8_t> t(16);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) t[a * 4 + b] = static_cast<std::uint8_t>(a ^ b);
  return t;
}

std::vector<std::uint8_t> s3_table() {
  // Permutations of {0,1,2} listed with the identity first.
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto index_of = [&](const int p[3]) {
    for (int i = 0; i < 6; ++i) {
      if (perms[i][0] == p[0] && perms[i][1] == p[1] && perms[i][2] == p[2]) return i;
    }
    return -1;
  };
  std::vector<std::uint8_t> t(36);
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      int comp[3];
      for (int i = 0; i < 3; ++i) comp[i] = perms[a][perms[b][i]];
      t[a * 6 + b] = static_cast<std::uint8_t>(index_of(comp));
    }
  }
  return t;
}

std::vector<std::uint8_t> q8_table() {
  // Encode +-1, +-i, +-j, +-k as (axis, sign): index = 2*axis + (sign<0).
  auto mul = [](int a, int b) {
    const int axis_a = a / 2, axis_b = b / 2;
    int sign = (a % 2 == 1 ? -1 : 1) * (b % 2 == 1 ? -1 : 1);
    static const int axis_mul[4][4] = {
        {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    // sign contributions of the unit-quaternion products
    static const int sign_mul[4][4] = {
        {1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
    sign *= sign_mul[axis_a][axis_b];
    return 2 * axis_mul[axis_a][axis_b] + (sign < 0 ? 1 : 0);
  };
  std::vector<std::uint8_t> t(64);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) t[a * 8 + b] = static_cast<std::uint8_t>(mul(a, b));
  return t;
}

std::vector<std::uint8_t> d4_table() {
  // Index k < 4: r^k; k >= 4: s r^{k-4}; with r^i s = s r^{-i}.
  auto mul = [](int a, int b) {
    const int sa = a / 4, ia = a % 4;
    const int sb = b / 4, ib = b % 4;
    // (s^sa r^ia)(s^sb r^ib) = s^(sa+sb) r^(ib + (sb ? -ia : ia))
    const int s = (sa + sb) % 2;
    const int i = ((sb ? ib - ia : ia + ib) % 4 + 4) % 4;
    return 4 * s + i;
  };
  std::vector<std::uint8_t> t(64);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) t[a * 8 + b] = static_cast<std::uint8_t>(mul(a, b));
  return t;
}

}  // namespace

std::string builtin_group_name(BuiltinGroup g) {
  switch (g) {
    case BuiltinGroup::Q8: return "q8";
    case BuiltinGroup::D4: return "d4";
    case BuiltinGroup::S3: return "s3";
    case BuiltinGroup::Z4: return "z4";
    case BuiltinGroup::Z3: return "z3";
    case BuiltinGroup::Z2xZ2: return "z2xz2";
  }
  return "?";
}

BuiltinGroup parse_builtin_group(const std::string& name) {
  if (name == "q8") return BuiltinGroup::Q8;
  if (name == "d4") return BuiltinGroup::D4;
  if (name == "s3") return BuiltinGroup::S3;
  if (name == "z4") return BuiltinGroup::Z4;
  if (name == "z3") return BuiltinGroup::Z3;
  if (name == "z2xz2") return BuiltinGroup::Z2xZ2;
  throw Error("unknown finite group: " + name);
}

FiniteGroup builtin_group(BuiltinGroup g) {
  switch (g) {
    case BuiltinGroup::Q8: return make_finite_group("q8", 8, q8_table());
    case BuiltinGroup::D4: return make_finite_group("d4", 8, d4_table());
    case BuiltinGroup::S3: return make_finite_group("s3", 6, s3_table());
    case BuiltinGroup::Z4: return make_finite_group("z4", 4, cyclic_table(4));
    case BuiltinGroup::Z3: return make_finite_group("z3", 3, cyclic_table(3));
    case BuiltinGroup::Z2xZ2: return make_finite_group("z2xz2", 4, klein_four_table());
  }
  throw Error("unreachable");
}

namespace {

// Big-endian encoding so that the numeric order is the lexicographic order.
std::uint64_t encode(const std::uint8_t* entries, int count, int order) {
  std::uint64_t key = 0;
  for (int i = 0; i < count; ++i) key = key * order + entries[i];
  return key;
}

void decode(std::uint64_t key, std::uint8_t* entries, int count, int order) {
  for (int i = count - 1; i >= 0; --i) {
    entries[i] = static_cast<std::uint8_t>(key % order);
    key /= order;
  }
}

int relation_value(const FiniteGroup& g, const SurfacePresentation& surface,
                   const std::uint8_t* e) {
  // Returns lhs * rhs^{-1} as a group element; 0 (identity) means on-variety.
  const int ell = surface.ell;
  int lhs = 0;
  for (int i = 0; i < ell; ++i) {
    const int a = e[2 * i], b = e[2 * i + 1];
    lhs = g.mul(lhs, g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))));
  }
  int rhs = 0;
  switch (surface.kind) {
    case SurfaceKind::RP2Sum:
      rhs = g.mul(e[2 * ell], e[2 * ell]);
      break;
    case SurfaceKind::KleinSum: {
      const int d = e[2 * ell], c = e[2 * ell + 1];
      rhs = g.mul(g.mul(g.mul(c, d), g.inv(c)), d);
      break;
    }
    case SurfaceKind::Orientable:
      rhs = 0;
      break;
  }
  return g.mul(lhs, g.inv(rhs));
}

}  // namespace

std::vector<FiniteTuple> enumerate_solutions(const FiniteGroup& g,
                                             const SurfacePresentation& surface,
                                             int twist) {
  if (!g.is_central(twist)) {
    throw Error("enumerate_solutions: twist must be a center element");
  }
  const int m = surface.entry_count();
  double total_d = 1.0;
  for (int i = 0; i < m; ++i) total_d *= g.order;
  if (total_d > 1e8) {
    throw SearchTooLargeError("enumerate_solutions: " + std::to_string(total_d) +
                              " tuples exceed the guard");
  }
  const std::uint64_t total = static_cast<std::uint64_t>(total_d);
  // The relation target: identity for Klein/orientable-with-e, twist for the
  // others.  RP^2: lhs * rhs^{-1} = r means prod [a,b] = c^2 r.
  int target = 0;
  if (surface.kind == SurfaceKind::RP2Sum || surface.kind == SurfaceKind::Orientable) {
    target = twist;
  }
  std::vector<FiniteTuple> out;
  std::vector<std::uint8_t> e(m, 0);
  for (std::uint64_t key = 0; key < total; ++key) {
    if (relation_value(g, surface, e.data()) == target) {
      out.push_back(FiniteTuple{surface, e, static_cast<std::uint8_t>(twist)});
    }
    // Odometer increment in big-endian order keeps the output lexicographic.
    for (int i = m - 1; i >= 0; --i) {
      if (++e[i] < g.order) break;
      e[i] = 0;
    }
  }
  return out;
}

namespace {

struct ConjTable {
  int order;
  std::vector<std::uint8_t> conj;  // conj[g * order + x] = g x g^{-1}

  explicit ConjTable(const FiniteGroup& g) : order(g.order), conj(g.order * g.order) {
    for (int a = 0; a < g.order; ++a) {
      for (int x = 0; x < g.order; ++x) {
        conj[a * g.order + x] = static_cast<std::uint8_t>(g.mul(g.mul(a, x), g.inv(a)));
      }
    }
  }
  int operator()(int a, int x) const { return conj[a * order + x]; }
};

void apply_diagonal(const ConjTable& conj, int gelem, const std::uint8_t* in,
                    std::uint8_t* out, int m) {
  for (int i = 0; i < m; ++i) out[i] = static_cast<std::uint8_t>(conj(gelem, in[i]));
}

// Two-basepoint action on a doubled tuple stored as 2m digits (plus block
// then minus block); the last entry of each block is the arc.
void apply_k(const FiniteGroup& g, const ConjTable& conj, int g1, int g2,
             const std::uint8_t* in, std::uint8_t* out, int m) {
  for (int i = 0; i < m - 1; ++i) {
    out[i] = static_cast<std::uint8_t>(conj(g1, in[i]));
    out[m + i] = static_cast<std::uint8_t>(conj(g2, in[m + i]));
  }
  out[m - 1] = static_cast<std::uint8_t>(g.mul(g.mul(g1, in[m - 1]), g.inv(g2)));
  out[2 * m - 1] = static_cast<std::uint8_t>(g.mul(g.mul(g2, in[2 * m - 1]), g.inv(g1)));
}

}  // namespace

std::vector<FiniteOrbit> orbit_decomposition(const FiniteGroup& g,
                                             const std::vector<FiniteTuple>& solutions,
                                             OrbitAction action) {
  if (solutions.empty()) return {};
  const SurfacePresentation surface = solutions.front().surface;
  const int m = surface.entry_count();
  const ConjTable conj(g);
  std::map<std::uint64_t, FiniteOrbit> orbits;  // canonical key -> orbit
  for (int idx = 0; idx < static_cast<int>(solutions.size()); ++idx) {
    const FiniteTuple& sol = solutions[idx];
    if (!(sol.surface == surface)) {
      throw Error("orbit_decomposition: solutions from mixed enumerations");
    }
    std::uint64_t best = ~0ull;
    long stab = 0;
    if (action == OrbitAction::KTauDiagonal) {
      const std::uint64_t self = encode(sol.entries.data(), m, g.order);
      std::vector<std::uint8_t> buf(m);
      for (int a = 0; a < g.order; ++a) {
        apply_diagonal(conj, a, sol.entries.data(), buf.data(), m);
        const std::uint64_t key = encode(buf.data(), m, g.order);
        best = std::min(best, key);
        if (key == self) ++stab;
      }
      FiniteOrbit& orbit = orbits[best];
      orbit.canonical_key = best;
      orbit.orbit_size = g.order / stab;
      orbit.member_indices.push_back(idx);
    } else {
      // Embed diagonally with the tuple's twist and act by K.
      std::vector<std::uint8_t> doubled(2 * m);
      std::copy(sol.entries.begin(), sol.entries.end(), doubled.begin());
      std::copy(sol.entries.begin(), sol.entries.end(), doubled.begin() + m);
      doubled[2 * m - 1] =
          static_cast<std::uint8_t>(g.mul(doubled[2 * m - 1], sol.twist));
      const std::uint64_t self = encode(doubled.data(), 2 * m, g.order);
      std::vector<std::uint8_t> buf(2 * m);
      for (int g1 = 0; g1 < g.order; ++g1) {
        for (int g2 = 0; g2 < g.order; ++g2) {
          apply_k(g, conj, g1, g2, doubled.data(), buf.data(), m);
          const std::uint64_t key = encode(buf.data(), 2 * m, g.order);
          best = std::min(best, key);
          if (key == self) ++stab;
        }
      }
      FiniteOrbit& orbit = orbits[best];
      orbit.canonical_key = best;
      orbit.orbit_size = static_cast<long>(g.order) * g.order / stab;
      orbit.member_indices.push_back(idx);
    }
  }
  std::vector<FiniteOrbit> out;
  out.reserve(orbits.size());
  for (auto& [key, orbit] : orbits) out.push_back(std::move(orbit));
  return out;
}

namespace {

// Both relations of the doubled model, evaluated exactly.
bool doubled_on_variety(const FiniteGroup& g, const SurfacePresentation& surface,
                        const std::uint8_t* e) {
  const int m = surface.entry_count();
  const int ell = surface.ell;
  for (int block = 0; block < 2; ++block) {
    const std::uint8_t* self = e + (block == 0 ? 0 : m);
    const std::uint8_t* other = e + (block == 0 ? m : 0);
    int lhs = 0;
    for (int i = 0; i < ell; ++i) {
      const int a = self[2 * i], b = self[2 * i + 1];
      lhs = g.mul(lhs, g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))));
    }
    int rhs;
    if (surface.kind == SurfaceKind::RP2Sum) {
      rhs = g.mul(self[m - 1], other[m - 1]);  // c cbar
    } else {
      // c dbar c^{-1} d
      const int c = self[m - 1], d = self[m - 2], dbar = other[m - 2];
      rhs = g.mul(g.mul(g.mul(c, dbar), g.inv(c)), d);
    }
    if (lhs != rhs) return false;
  }
  return true;
}

}  // namespace

ExactFiberReport exact_fiber_degree(const FiniteGroup& g, const SurfacePresentation& surface,
                                    long search_guard) {
  if (surface.orientable()) {
    throw Error("exact_fiber_degree: needs a nonorientable surface");
  }
  const int m = surface.entry_count();
  double total_d = 1.0;
  for (int i = 0; i < 2 * m; ++i) total_d *= g.order;
  if (total_d > static_cast<double>(search_guard)) {
    throw SearchTooLargeError("exact_fiber_degree: doubled space has " +
                              std::to_string(total_d) + " tuples");
  }
  const std::uint64_t total = static_cast<std::uint64_t>(total_d);
  const ConjTable conj(g);

  ExactFiberReport report;
  report.group = g.name;
  report.surface = surface;
  report.predicted_degree =
      static_cast<int>(g.center.size() / g.two_center.size());

  // Enumerate M.
  std::unordered_map<std::uint64_t, int> orbit_of;  // encoded point -> orbit id
  {
    std::vector<std::uint8_t> e(2 * m, 0);
    for (std::uint64_t key = 0; key < total; ++key) {
      if (doubled_on_variety(g, surface, e.data())) orbit_of.emplace(key, -1);
      for (int i = 2 * m - 1; i >= 0; --i) {
        if (++e[i] < g.order) break;
        e[i] = 0;
      }
    }
  }
  report.doubled_solutions = static_cast<long>(orbit_of.size());

  // K-orbit decomposition by breadth-first closure.
  std::vector<std::uint64_t> canonical;  // per orbit: minimal key
  {
    std::vector<std::uint64_t> stack;
    std::vector<std::uint8_t> digits(2 * m), buf(2 * m);
    // Deterministic order: seed BFS from points in increasing key order.
    std::vector<std::uint64_t> keys;
    keys.reserve(orbit_of.size());
    for (const auto& [key, id] : orbit_of) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    for (const std::uint64_t seed_key : keys) {
      auto it = orbit_of.find(seed_key);
      if (it->second >= 0) continue;
      const int orbit_id = static_cast<int>(canonical.size());
      canonical.push_back(seed_key);
      it->second = orbit_id;
      stack.push_back(seed_key);
      while (!stack.empty()) {
        const std::uint64_t cur = stack.back();
        stack.pop_back();
        decode(cur, digits.data(), 2 * m, g.order);
        for (int g1 = 0; g1 < g.order; ++g1) {
          for (int g2 = 0; g2 < g.order; ++g2) {
            apply_k(g, conj, g1, g2, digits.data(), buf.data(), m);
            const std::uint64_t next = encode(buf.data(), 2 * m, g.order);
            auto nit = orbit_of.find(next);
            if (nit == orbit_of.end()) {
              throw Error("internal: K-action left the solution set");
            }
            if (nit->second < 0) {
              nit->second = orbit_id;
              stack.push_back(next);
            }
          }
        }
      }
    }
  }
  const int num_orbits = static_cast<int>(canonical.size());
  report.orbit_count = num_orbits;

  // Per-orbit flags: tau-fixed and generic (stabilizer == diagonal center).
  std::vector<char> tau_fixed(num_orbits, 0), generic(num_orbits, 0);
  {
    std::vector<std::uint8_t> digits(2 * m), buf(2 * m);
    for (int o = 0; o < num_orbits; ++o) {
      decode(canonical[o], digits.data(), 2 * m, g.order);
      std::vector<std::uint8_t> swapped(digits.begin() + m, digits.begin() + 2 * m);
      swapped.insert(swapped.end(), digits.begin(), digits.begin() + m);
      const std::uint64_t tau_key = encode(swapped.data(), 2 * m, g.order);
      tau_fixed[o] = orbit_of.at(tau_key) == o;
      long stab = 0;
      bool diagonal_central = true;
      for (int g1 = 0; g1 < g.order && diagonal_central; ++g1) {
        for (int g2 = 0; g2 < g.order; ++g2) {
          apply_k(g, conj, g1, g2, digits.data(), buf.data(), m);
          if (encode(buf.data(), 2 * m, g.order) == canonical[o]) {
            ++stab;
            if (g1 != g2 || !g.is_central(g1)) {
              diagonal_central = false;
              break;
            }
          }
        }
      }
      generic[o] = diagonal_central && stab == static_cast<long>(g.center.size());
      if (tau_fixed[o]) ++report.fixed_orbit_count;
      if (tau_fixed[o] && generic[o]) ++report.generic_fixed_orbit_count;
    }
  }

  // P(N_r) for every central r, via the twisted diagonal embedding.
  const int num_classes = static_cast<int>(g.center_quotient_classes.size());
  std::vector<std::vector<std::vector<int>>> orbits_per_class_member(num_classes);
  std::vector<std::vector<long>> counts_per_class_member(num_classes);
  std::vector<std::uint64_t> ne_embedded_key;  // embedded key per N_e solution
  std::vector<std::vector<std::uint8_t>> ne_entries;
  for (int cls = 0; cls < num_classes; ++cls) {
    for (int r : g.center_quotient_classes[cls]) {
      const auto solutions = enumerate_solutions(g, surface, r);
      std::vector<int> ids;
      std::vector<std::uint8_t> doubled(2 * m);
      for (const FiniteTuple& sol : solutions) {
        std::copy(sol.entries.begin(), sol.entries.end(), doubled.begin());
        std::copy(sol.entries.begin(), sol.entries.end(), doubled.begin() + m);
        doubled[2 * m - 1] = static_cast<std::uint8_t>(g.mul(doubled[2 * m - 1], r));
        const std::uint64_t key = encode(doubled.data(), 2 * m, g.order);
        auto it = orbit_of.find(key);
        if (it == orbit_of.end()) {
          throw Error("internal: twisted diagonal embedding missed M");
        }
        ids.push_back(it->second);
        if (cls == 0 && r == 0) {
          ne_embedded_key.push_back(key);
          ne_entries.push_back(sol.entries);
        }
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      orbits_per_class_member[cls].push_back(std::move(ids));
      counts_per_class_member[cls].push_back(static_cast<long>(solutions.size()));
    }
  }

  for (int cls = 0; cls < num_classes; ++cls) {
    ExactFiberReport::PerClass pc;
    pc.class_index = cls;
    pc.twist_members = g.center_quotient_classes[cls];
    pc.solutions_per_twist = counts_per_class_member[cls];
    // Double inclusion: all members of the class give the same projected set.
    const auto& first = orbits_per_class_member[cls].front();
    for (const auto& other : orbits_per_class_member[cls]) {
      if (other != first) pc.members_agree = false;
    }
    std::vector<int> merged;
    for (const auto& other : orbits_per_class_member[cls]) {
      merged.insert(merged.end(), other.begin(), other.end());
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    pc.all_orbit_ids = merged;
    for (int id : merged) {
      if (tau_fixed[id] && generic[id]) pc.fixed_generic_orbits.push_back(id);
    }
    report.per_class.push_back(std::move(pc));
  }

  // Disjointness of the generic parts of distinct classes.
  for (int c1 = 0; c1 < num_classes && report.partition_disjoint; ++c1) {
    for (int c2 = c1 + 1; c2 < num_classes; ++c2) {
      const auto& a = report.per_class[c1].fixed_generic_orbits;
      const auto& b = report.per_class[c2].fixed_generic_orbits;
      std::vector<int> inter;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(inter));
      if (!inter.empty()) {
        report.partition_disjoint = false;
        break;
      }
    }
  }

  // Coverage of the generic fixed orbits by the union of the P([r]).
  std::vector<int> covered_ids;
  for (const auto& pc : report.per_class) {
    covered_ids.insert(covered_ids.end(), pc.all_orbit_ids.begin(), pc.all_orbit_ids.end());
  }
  std::sort(covered_ids.begin(), covered_ids.end());
  for (int o = 0; o < num_orbits; ++o) {
    if (!tau_fixed[o] || !generic[o]) continue;
    if (!std::binary_search(covered_ids.begin(), covered_ids.end(), o)) {
      report.covered = false;
    }
    const auto& pe = report.per_class[0].all_orbit_ids;
    if (!std::binary_search(pe.begin(), pe.end(), o)) {
      report.defect_orbits.push_back(o);
    }
  }

  // Exact fiber of I over each generic fixed orbit of P([e]): the number of
  // simultaneous-conjugation classes of N_e solutions whose embed lands in
  // the orbit.
  {
    // Canonical diagonal-conjugation key per N_e solution.
    std::vector<std::uint64_t> diag_key(ne_entries.size());
    std::vector<std::uint8_t> buf(m);
    for (std::size_t i = 0; i < ne_entries.size(); ++i) {
      std::uint64_t best = ~0ull;
      for (int a = 0; a < g.order; ++a) {
        apply_diagonal(conj, a, ne_entries[i].data(), buf.data(), m);
        best = std::min(best, encode(buf.data(), m, g.order));
      }
      diag_key[i] = best;
    }
    std::map<int, std::vector<std::uint64_t>> classes_per_orbit;
    for (std::size_t i = 0; i < ne_entries.size(); ++i) {
      const int orbit_id = orbit_of.at(ne_embedded_key[i]);
      classes_per_orbit[orbit_id].push_back(diag_key[i]);
    }
    for (const int id : report.per_class[0].fixed_generic_orbits) {
      auto& keys = classes_per_orbit[id];
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
      const int degree = static_cast<int>(keys.size());
      report.fiber_histogram[degree] += 1;
      if (degree != report.predicted_degree) report.degrees_match_prediction = false;
    }
  }
  return report;
}

}  // namespace holovar
