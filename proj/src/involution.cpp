#include "holovar/involution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "holovar/errors.hpp"
#include "holovar/rng.hpp"
#include "optim.hpp"

namespace holovar {

using detail::Letter;
using detail::WordTerm;

DoubledTuple tau_point(const DoubledTuple& x) {
  DoubledTuple out = x;
  std::swap(out.plus_entries, out.minus_entries);
  return out;
}

GaugePair tau_gauge(const GaugePair& k) { return {k.g2, k.g1}; }

CenterQuotientClass twist_class(const CenterTable& table, const GroupElement& r) {
  double dist = 0.0;
  const int idx = table.nearest(r.mat, &dist);
  if (dist > 1e-6) {
    throw Error("twist_class: element is not central (distance " + std::to_string(dist) + ")");
  }
  CenterQuotientClass out{.group = table.group,
                          .class_index = table.class_of[idx],
                          .num_classes = static_cast<int>(table.quotient_classes.size()),
                          .representative = 0};
  out.representative = table.quotient_classes[out.class_index].front();
  return out;
}

namespace {

// Residual terms for the twist-constrained alignment (g, r^{-1} g^{-1}) . x
// = tau(x), with g the only variable.
std::vector<WordTerm> constrained_witness_terms(const DoubledTuple& x, const Matrix& r) {
  const int dim = static_cast<int>(r.rows());
  const Matrix id = Matrix::Identity(dim, dim);
  const int m = static_cast<int>(x.plus_entries.size());
  std::vector<WordTerm> terms;
  for (int i = 0; i < m - 1; ++i) {
    // g v g^{-1} = vbar
    WordTerm t;
    t.letters = {Letter::variable(0, 1), Letter::fixed(x.plus_entries[i].mat),
                 Letter::variable(0, -1)};
    t.right = id;
    t.offset = x.minus_entries[i].mat;
    terms.push_back(std::move(t));
    // g2 vbar g2^{-1} = v with g2 = r^{-1} g^{-1}: central r cancels.
    WordTerm u;
    u.letters = {Letter::variable(0, -1), Letter::fixed(x.minus_entries[i].mat),
                 Letter::variable(0, 1)};
    u.right = id;
    u.offset = x.plus_entries[i].mat;
    terms.push_back(std::move(u));
  }
  const Matrix& c = x.plus_entries[m - 1].mat;
  const Matrix& cbar = x.minus_entries[m - 1].mat;
  // g c g2^{-1} = g c g r = cbar
  WordTerm t;
  t.letters = {Letter::variable(0, 1), Letter::fixed(c), Letter::variable(0, 1),
               Letter::fixed(r)};
  t.right = id;
  t.offset = cbar;
  terms.push_back(std::move(t));
  // g2 cbar g^{-1} = r^{-1} g^{-1} cbar g^{-1} = c
  WordTerm u;
  u.letters = {Letter::fixed(r.adjoint()), Letter::variable(0, -1), Letter::fixed(cbar),
               Letter::variable(0, -1)};
  u.right = id;
  u.offset = c;
  terms.push_back(std::move(u));
  return terms;
}

}  // namespace

namespace {

// Snap the twist of an approximate witness (g1, g2) and re-validate with g2
// constrained to r^{-1} g1^{-1}.  Throws NonCentralTwistError when the twist
// refuses to snap or the constrained polish cannot reach eps_align.
FixedClassWitness certify_witness(const DoubledTuple& x, const CenterTable& table,
                                  const Matrix& g1, const Matrix& g2,
                                  const WitnessOptions& opts) {
  const GroupId group = x.group;
  const Matrix r_raw = (g2 * g1).adjoint();
  double snap_dist = 0.0;
  const int r_idx = table.nearest(r_raw, &snap_dist);
  if (snap_dist >= opts.tol.eps_center) {
    throw NonCentralTwistError("witness twist is " + std::to_string(snap_dist) +
                               " away from the nearest central element");
  }
  const GroupElement r = table.elements[r_idx];
  const auto terms = constrained_witness_terms(x, r.mat);
  detail::LmOptions lm;
  lm.max_iters = opts.align.max_iters;
  lm.tol = 1e-13;
  detail::LmResult polish = detail::lm_minimize(group, terms, {g1}, lm);
  if (!(polish.residual < opts.tol.eps_align)) {
    throw NonCentralTwistError("snapped twist failed re-validation (residual " +
                               std::to_string(polish.residual) + ")");
  }
  const GroupElement g = project_to_group(polish.vars[0], group);
  return FixedClassWitness{
      GaugePair{g, {group, r.mat.adjoint() * g.mat.adjoint()}}, r, r_idx, polish.residual};
}

}  // namespace

std::optional<FixedClassWitness> find_fixed_witness(const DoubledTuple& x,
                                                    const CenterTable& table,
                                                    std::uint64_t seed,
                                                    const WitnessOptions& opts) {
  const GroupId group = x.group;
  const int m = static_cast<int>(x.plus_entries.size());
  const std::span<const GroupElement> plus_v(x.plus_entries.data(), m - 1);
  const std::span<const GroupElement> minus_v(x.minus_entries.data(), m - 1);
  const GroupElement& c = x.plus_entries[m - 1];
  const GroupElement& cbar = x.minus_entries[m - 1];
  const DoubledTuple tx = tau_point(x);

  // Structured search: align the V-blocks, then read g2 off the arc equation
  // g1 c g2^{-1} = cbar.  For a generic fixed point any V-aligner works.
  if (m > 1) {
    const AlignmentResult block = align_entries_conjugation(
        plus_v, minus_v, group, derive_seed(seed, 1), opts.align);
    if (!block.found && block.starts_used == 0) {
      // Trace certificate: the V-blocks are not even conjugate, so no gauge
      // pair can exchange them.
      return std::nullopt;
    }
    if (block.found) {
      const Matrix g1 = block.witness[0].mat;
      const Matrix g2 = cbar.mat.adjoint() * g1 * c.mat;
      const GaugePair k{{group, g1}, {group, g2}};
      if (tuple_distance(apply_action(k, x), tx) < opts.tol.eps_align) {
        return certify_witness(x, table, g1, g2, opts);
      }
      // V-blocks align but the arcs refuse: fall through to the full search.
    }
  }
  const AlignmentResult full =
      align_two_basepoint(x, tx, derive_seed(seed, 2), opts.align);
  if (!full.found) return std::nullopt;
  return certify_witness(x, table, full.witness[0].mat, full.witness[1].mat, opts);
}

NTuple normalize_to_Nr(const DoubledTuple& x, const FixedClassWitness& witness,
                       std::uint64_t seed, const WitnessOptions& opts) {
  const GroupId group = x.group;
  const int m = static_cast<int>(x.plus_entries.size());
  std::vector<GroupElement> entries(x.plus_entries.begin(), x.plus_entries.end());
  entries[m - 1] = {group, x.plus_entries[m - 1].mat * witness.k.g1.mat};
  NTuple t{x.surface, group, std::move(entries), witness.twist};
  double res = relation_residual(t);
  if (res >= 0.1) {
    throw NormalizationFailedError("normalized tuple is far off-variety (residual " +
                                   std::to_string(res) + ")");
  }
  if (res >= opts.tol.eps_rel) {
    try {
      t = refine(t, opts.tol.eps_rel * 0.1);
    } catch (const NoConvergenceError&) {
      throw NormalizationFailedError("could not polish the normalized tuple");
    }
  }
  // Certify diagonal_embed(t) ~ x via the witness (e, g1^{-1}).
  const DoubledTuple embedded = diagonal_embed(t, opts.tol);
  const GaugePair shift{identity_element(group), witness.k.g1.inverse()};
  const double direct = tuple_distance(apply_action(shift, x), embedded);
  if (direct < 10.0 * opts.tol.eps_align) return t;
  AlignOptions verify = opts.align;
  const GaugePair hint{identity_element(group), witness.k.g1.inverse()};
  const AlignmentResult check = align_two_basepoint(
      x, embedded, derive_seed(seed, 3), verify, std::span<const GaugePair>(&hint, 1));
  if (!check.found) {
    throw NormalizationFailedError("normalized tuple is not K-equivalent to the input");
  }
  return t;
}

DoubledTuple map_I(const NTuple& x, const Tolerances& tol) {
  const int dim = x.group.matrix_dim();
  if (frobenius_distance(x.twist.mat, Matrix::Identity(dim, dim)) > 1e-8) {
    throw Error("map_I: tuple must have twist e");
  }
  return diagonal_embed(x, tol);
}

FiberReport fiber_of_I(const NTuple& x, const CenterTable& table, std::uint64_t seed,
                       const FiberOptions& opts) {
  FiberReport report;
  const GroupId group = x.group;
  const int m = static_cast<int>(x.entries.size());
  std::vector<NTuple> candidates;
  for (int s : table.sqrt_of_identity) {
    NTuple cand = x;
    cand.entries[m - 1] = {group, x.entries[m - 1].mat * table.elements[s].mat};
    candidates.push_back(std::move(cand));
    report.candidate_sqrt.push_back(s);
  }
  const int n_cand = static_cast<int>(candidates.size());
  // Every candidate is K-equivalent upstairs via k = (e, s); record the worst
  // defect of that identity as evidence.
  const DoubledTuple upstairs = diagonal_embed(x, opts.tol);
  for (int i = 0; i < n_cand; ++i) {
    const GroupElement& s = table.elements[report.candidate_sqrt[i]];
    const GaugePair k{identity_element(group), s};
    const double defect =
        tuple_distance(apply_action(k, upstairs), diagonal_embed(candidates[i], opts.tol));
    report.max_embed_defect = std::max(report.max_embed_defect, defect);
  }
  // Union-find over candidates under diagonal equivalence.
  std::vector<int> parent(n_cand);
  for (int i = 0; i < n_cand; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  for (int i = 0; i < n_cand; ++i) {
    for (int j = i + 1; j < n_cand; ++j) {
      const AlignmentResult ar = align_conjugation(
          candidates[i], candidates[j], derive_seed(seed, i * n_cand + j), opts.align);
      report.align_starts_total += ar.starts_used;
      std::string evidence = "s" + std::to_string(report.candidate_sqrt[i]) + "/s" +
                             std::to_string(report.candidate_sqrt[j]) + ":";
      if (ar.found) {
        parent[find(i)] = find(j);
        evidence += "aligned(" + std::to_string(ar.residual) + ")";
      } else if (ar.starts_used == 0) {
        evidence += "trace-reject(" + std::to_string(ar.residual) + ")";
      } else {
        // Optimization failed but traces did not separate: inconclusive.
        evidence += "ambiguous(" + std::to_string(ar.residual) + ")";
        report.countable = false;
      }
      report.dedup_evidence.push_back(std::move(evidence));
    }
  }
  for (int i = 0; i < n_cand; ++i) {
    if (find(i) == i) report.classes.push_back(candidates[i]);
  }
  report.degree = static_cast<int>(report.classes.size());
  return report;
}

NTuple phi_map(const DoubledTuple& x, const Tolerances& tol) {
  if (x.surface.kind != SurfaceKind::RP2Sum) {
    throw Error("phi_map: only the RP^2 model is supported");
  }
  if (x.surface.ell < 1) {
    throw Error("phi_map: need ell >= 1 for an orientable image of positive genus");
  }
  const double res = relation_residual(x);
  if (!(res < tol.eps_rel)) {
    throw OffVarietyError("phi_map: relation residual " + std::to_string(res));
  }
  const GroupId group = x.group;
  const int ell = x.surface.ell;
  const Matrix& cprime = x.minus_entries[2 * ell].mat;
  std::vector<GroupElement> entries(x.plus_entries.begin(), x.plus_entries.end() - 1);
  for (int i = ell - 1; i >= 0; --i) {
    entries.push_back({group, cprime.adjoint() * x.minus_entries[2 * i + 1].mat * cprime});
    entries.push_back({group, cprime.adjoint() * x.minus_entries[2 * i].mat * cprime});
  }
  return NTuple{SurfacePresentation(SurfaceKind::Orientable, 2 * ell), group,
                std::move(entries), identity_element(group)};
}

CosetTuple project_center(const NTuple& x, const CenterTable& table) {
  if (table.size() < 2) {
    throw Error("project_center: the center of " + table.group.label() + " is trivial");
  }
  NTuple rep = x;
  const int z = table.size();
  for (GroupElement& e : rep.entries) {
    // First entry of maximal modulus, with a small slack for ties.
    int pivot_r = 0, pivot_c = 0;
    double best = -1.0;
    for (int r = 0; r < e.mat.rows(); ++r) {
      for (int c = 0; c < e.mat.cols(); ++c) {
        if (std::abs(e.mat(r, c)) > best + 1e-9) {
          best = std::abs(e.mat(r, c));
          pivot_r = r;
          pivot_c = c;
        }
      }
    }
    const double phase = std::arg(e.mat(pivot_r, pivot_c));
    const double window = 2.0 * M_PI / z;
    double wrapped = phase;
    while (wrapped < 0.0) wrapped += 2.0 * M_PI;
    const int k = static_cast<int>(std::floor(wrapped / window)) % z;
    // Multiply by the central element shifting the phase back into the window.
    const Matrix& shift = table.elements[(z - k) % z].mat;
    e.mat = shift(0, 0) * e.mat;
  }
  return CosetTuple{std::move(rep)};
}

bool coset_equal(const CosetTuple& a, const CosetTuple& b, double eps) {
  if (a.representative.entries.size() != b.representative.entries.size()) return false;
  return tuple_distance(a.representative, b.representative) < eps;
}

Obstruction lift_and_obstruct(const CosetTuple& h, const SurfacePresentation& surface,
                              const CenterTable& table, const Tolerances& tol) {
  const NTuple& rep = h.representative;
  if (!(rep.surface == surface)) {
    throw Error("lift_and_obstruct: surface mismatch");
  }
  const GroupId group = rep.group;
  const int dim = group.matrix_dim();
  Matrix defect = Matrix::Identity(dim, dim);
  const int ell = surface.ell;
  for (int i = 0; i < ell; ++i) {
    defect = defect * commutator(rep.entries[2 * i], rep.entries[2 * i + 1]).mat;
  }
  switch (surface.kind) {
    case SurfaceKind::Orientable:
      break;
    case SurfaceKind::RP2Sum: {
      const Matrix& c = rep.entries[2 * ell].mat;
      defect = defect * (c * c).adjoint();
      break;
    }
    case SurfaceKind::KleinSum: {
      const Matrix& d = rep.entries[2 * ell].mat;
      const Matrix& c = rep.entries[2 * ell + 1].mat;
      defect = defect * (c * d * c.adjoint() * d).adjoint();
      break;
    }
  }
  double dist = 0.0;
  const int idx = table.nearest(defect, &dist);
  if (dist >= tol.eps_center) {
    throw NonCentralObstructionError("relation defect is " + std::to_string(dist) +
                                     " away from the center");
  }
  Obstruction out{table.elements[idx], idx, twist_class(table, table.elements[idx]),
                  surface.kind != SurfaceKind::Orientable};
  return out;
}

bool verify_lift_commutator_identity(const NTuple& x, double eps_rel) {
  if (x.surface.kind != SurfaceKind::RP2Sum) {
    throw Error("verify_lift_commutator_identity: RP^2 tuples only");
  }
  const GroupId group = x.group;
  const int dim = group.matrix_dim();
  const int ell = x.surface.ell;
  const Matrix& c = x.entries[2 * ell].mat;
  Matrix prod = Matrix::Identity(dim, dim);
  for (int i = 0; i < ell; ++i) {
    prod = prod * commutator(x.entries[2 * i], x.entries[2 * i + 1]).mat;
  }
  for (int i = ell - 1; i >= 0; --i) {
    const GroupElement bi{group, c.adjoint() * x.entries[2 * i + 1].mat * c};
    const GroupElement ai{group, c.adjoint() * x.entries[2 * i].mat * c};
    prod = prod * commutator(bi, ai).mat;
  }
  return (prod - Matrix::Identity(dim, dim)).norm() < eps_rel;
}

}  // namespace holovar
