#include "holovar/variety.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "holovar/errors.hpp"
#include "holovar/rng.hpp"
#include "optim.hpp"

namespace holovar {

using detail::Letter;
using detail::WordTerm;

std::string surface_kind_name(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::RP2Sum: return "rp2";
    case SurfaceKind::KleinSum: return "klein";
    case SurfaceKind::Orientable: return "orientable";
  }
  return "?";
}

SurfaceKind parse_surface_kind(const std::string& name) {
  if (name == "rp2") return SurfaceKind::RP2Sum;
  if (name == "klein") return SurfaceKind::KleinSum;
  if (name == "orientable" || name == "genus") return SurfaceKind::Orientable;
  throw Error("unknown surface kind: " + name);
}

SurfacePresentation::SurfacePresentation(SurfaceKind k, int l) : kind(k), ell(l) {
  if (l < 0) throw Error("surface: ell must be nonnegative");
  if (k == SurfaceKind::Orientable && l < 1) {
    throw Error("surface: orientable genus must be >= 1");
  }
}

int SurfacePresentation::entry_count() const {
  switch (kind) {
    case SurfaceKind::RP2Sum: return 2 * ell + 1;
    case SurfaceKind::KleinSum: return 2 * ell + 2;
    case SurfaceKind::Orientable: return 2 * ell;
  }
  return 0;
}

std::string SurfacePresentation::label() const {
  return surface_kind_name(kind) + "(" + std::to_string(ell) + ")";
}

SurfacePresentation double_cover(const SurfacePresentation& s) {
  switch (s.kind) {
    case SurfaceKind::RP2Sum:
      return {SurfaceKind::Orientable, 2 * s.ell};
    case SurfaceKind::KleinSum:
      return {SurfaceKind::Orientable, 2 * s.ell + 1};
    case SurfaceKind::Orientable:
      throw AlreadyOrientableError("double_cover: " + s.label() + " is orientable");
  }
  throw Error("unreachable");
}

namespace detail_words {

// Relation residual blocks with entries as the word variables.  Central
// twists multiply on the right, so eval * right == LHS * RHS^{-1}.
std::vector<WordTerm> ntuple_terms(const SurfacePresentation& surface, int dim,
                                   const Matrix& twist) {
  std::vector<WordTerm> terms(1);
  WordTerm& t = terms[0];
  const int ell = surface.ell;
  for (int i = 0; i < ell; ++i) detail::append_commutator(t.letters, 2 * i, 2 * i + 1);
  switch (surface.kind) {
    case SurfaceKind::RP2Sum: {
      const int c = 2 * ell;
      t.letters.push_back(Letter::variable(c, -1));
      t.letters.push_back(Letter::variable(c, -1));
      t.right = twist.adjoint();
      break;
    }
    case SurfaceKind::KleinSum: {
      // The twist does not enter the relation; it only twists the embedding
      // into the double cover.
      const int d = 2 * ell;
      const int c = 2 * ell + 1;
      t.letters.push_back(Letter::variable(d, -1));
      t.letters.push_back(Letter::variable(c, 1));
      t.letters.push_back(Letter::variable(d, -1));
      t.letters.push_back(Letter::variable(c, -1));
      t.right = Matrix::Identity(dim, dim);
      break;
    }
    case SurfaceKind::Orientable:
      t.right = twist.adjoint();
      break;
  }
  t.offset = Matrix::Identity(dim, dim);
  return terms;
}

// Variables are plus entries followed by minus entries.
std::vector<WordTerm> doubled_terms(const SurfacePresentation& surface, int dim) {
  const int m = surface.entry_count();
  std::vector<WordTerm> terms(2);
  const Matrix id = Matrix::Identity(dim, dim);
  const int ell = surface.ell;
  for (int block = 0; block < 2; ++block) {
    WordTerm& t = terms[block];
    const int base = block == 0 ? 0 : m;
    const int other = block == 0 ? m : 0;
    for (int i = 0; i < ell; ++i) {
      detail::append_commutator(t.letters, base + 2 * i, base + 2 * i + 1);
    }
    if (surface.kind == SurfaceKind::RP2Sum) {
      const int c = base + 2 * ell;
      const int cbar = other + 2 * ell;
      // prod [a,b] = c cbar  ->  append (c cbar)^{-1}
      t.letters.push_back(Letter::variable(cbar, -1));
      t.letters.push_back(Letter::variable(c, -1));
    } else {
      const int d = base + 2 * ell;
      const int c = base + 2 * ell + 1;
      const int dbar = other + 2 * ell;
      // prod [a,b] = c dbar c^{-1} d  ->  append d^{-1} c dbar^{-1} c^{-1}
      t.letters.push_back(Letter::variable(d, -1));
      t.letters.push_back(Letter::variable(c, 1));
      t.letters.push_back(Letter::variable(dbar, -1));
      t.letters.push_back(Letter::variable(c, -1));
    }
    t.right = id;
    t.offset = id;
  }
  return terms;
}

std::vector<Matrix> entry_matrices(const std::vector<GroupElement>& entries) {
  std::vector<Matrix> out;
  out.reserve(entries.size());
  for (const GroupElement& e : entries) out.push_back(e.mat);
  return out;
}

}  // namespace detail_words

namespace {

void check_shape(const NTuple& x) {
  if (static_cast<int>(x.entries.size()) != x.surface.entry_count()) {
    throw Error("tuple entry count does not match " + x.surface.label());
  }
}

void check_shape(const DoubledTuple& x) {
  if (x.surface.orientable()) {
    throw Error("doubled tuple must have a nonorientable base");
  }
  const int m = x.surface.entry_count();
  if (static_cast<int>(x.plus_entries.size()) != m ||
      static_cast<int>(x.minus_entries.size()) != m) {
    throw Error("doubled tuple blocks do not match " + x.surface.label());
  }
}

}  // namespace

double relation_residual(const NTuple& x) {
  check_shape(x);
  const auto terms =
      detail_words::ntuple_terms(x.surface, x.group.matrix_dim(), x.twist.mat);
  const auto vars = detail_words::entry_matrices(x.entries);
  double total = 0.0;
  for (const WordTerm& t : terms) total += detail::eval_word(t, vars).norm();
  return total;
}

double relation_residual(const DoubledTuple& x) {
  check_shape(x);
  const auto terms = detail_words::doubled_terms(x.surface, x.group.matrix_dim());
  auto vars = detail_words::entry_matrices(x.plus_entries);
  for (const GroupElement& e : x.minus_entries) vars.push_back(e.mat);
  double total = 0.0;
  for (const WordTerm& t : terms) total += detail::eval_word(t, vars).norm();
  return total;
}

double tuple_distance(const NTuple& a, const NTuple& b) {
  if (a.entries.size() != b.entries.size()) {
    throw Error("tuple_distance: shape mismatch");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    sq += (a.entries[i].mat - b.entries[i].mat).squaredNorm();
  }
  return std::sqrt(sq);
}

double tuple_distance(const DoubledTuple& a, const DoubledTuple& b) {
  if (a.plus_entries.size() != b.plus_entries.size() ||
      a.minus_entries.size() != b.minus_entries.size()) {
    throw Error("tuple_distance: shape mismatch");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.plus_entries.size(); ++i) {
    sq += (a.plus_entries[i].mat - b.plus_entries[i].mat).squaredNorm();
  }
  for (std::size_t i = 0; i < a.minus_entries.size(); ++i) {
    sq += (a.minus_entries[i].mat - b.minus_entries[i].mat).squaredNorm();
  }
  return std::sqrt(sq);
}

DoubledTuple diagonal_embed(const NTuple& x, const Tolerances& tol) {
  if (x.surface.orientable()) {
    throw Error("diagonal_embed: base surface must be nonorientable");
  }
  const double res = relation_residual(x);
  if (!(res < tol.eps_rel)) {
    throw OffVarietyError("diagonal_embed: relation residual " + std::to_string(res));
  }
  DoubledTuple out{x.surface, x.group, x.entries, x.entries};
  GroupElement& cbar = out.minus_entries.back();
  cbar = {x.group, cbar.mat * x.twist.mat};
  return out;
}

std::pair<GroupElement, GroupElement> solve_commutator(const GroupElement& w,
                                                       std::uint64_t seed,
                                                       const CommutatorSolveOptions& opts) {
  const GroupId group = w.group;
  const int dim = group.matrix_dim();
  std::vector<WordTerm> terms(1);
  detail::append_commutator(terms[0].letters, 0, 1);
  terms[0].right = Matrix::Identity(dim, dim);
  terms[0].offset = w.mat;

  detail::MultiStartOptions ms;
  ms.restarts = opts.restarts;
  ms.lm.max_iters = opts.max_iters;
  ms.lm.tol = 1e-12;
  ms.accept = opts.accept;
  const std::vector<std::vector<Matrix>> hints = {
      {Matrix::Identity(dim, dim), Matrix::Identity(dim, dim)}};
  detail::LmResult best = detail::multi_start(group, terms, hints, 2, seed, ms);
  if (!(best.residual < opts.accept)) {
    throw NoConvergenceError("solve_commutator: best residual " +
                             std::to_string(best.residual) + " after " +
                             std::to_string(opts.restarts) + " restarts");
  }
  return {project_to_group(best.vars[0], group), project_to_group(best.vars[1], group)};
}

namespace {

NTuple sample_rp2(const SurfacePresentation& surface, const GroupId& group,
                  const GroupElement& twist, std::uint64_t seed, const SampleOptions& opts) {
  const int ell = surface.ell;
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    const std::uint64_t attempt_seed = derive_seed(seed, attempt);
    std::vector<GroupElement> entries;
    Matrix prod = Matrix::Identity(group.matrix_dim(), group.matrix_dim());
    for (int i = 0; i < 2 * ell; ++i) {
      entries.push_back(haar_sample(group, derive_seed(attempt_seed, i)));
    }
    for (int i = 0; i < ell; ++i) {
      prod = prod * commutator(entries[2 * i], entries[2 * i + 1]).mat;
    }
    const GroupElement w{group, prod * twist.mat.adjoint()};
    try {
      entries.push_back(principal_square_root(w, opts.tol.delta_branch));
    } catch (const BranchCutError&) {
      continue;
    }
    return NTuple{surface, group, std::move(entries), twist};
  }
  throw SamplingExhaustedError("sample_point: branch cut hit on every attempt");
}

NTuple sample_klein(const SurfacePresentation& surface, const GroupId& group,
                    const GroupElement& twist, std::uint64_t seed, const SampleOptions& opts) {
  const int ell = surface.ell;
  const int dim = group.matrix_dim();
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    const std::uint64_t attempt_seed = derive_seed(seed, attempt ^ 0x51);
    if (ell == 0) {
      // Solve the relation c d c^{-1} d = e over (d, c) directly.
      NTuple x{surface, group,
               {haar_sample(group, derive_seed(attempt_seed, 1)),
                haar_sample(group, derive_seed(attempt_seed, 2))},
               twist};
      const auto terms = detail_words::ntuple_terms(surface, dim, twist.mat);
      detail::MultiStartOptions ms;
      ms.restarts = opts.restarts;
      ms.lm.max_iters = opts.max_iters;
      ms.accept = opts.tol.eps_rel * 0.5;
      detail::LmResult best = detail::multi_start(
          group, terms, {detail_words::entry_matrices(x.entries)}, 2,
          derive_seed(attempt_seed, 3), ms);
      if (!(best.residual < ms.accept)) continue;
      x.entries[0] = project_to_group(best.vars[0], group);
      x.entries[1] = project_to_group(best.vars[1], group);
      if (relation_residual(x) < opts.tol.eps_rel) return x;
      continue;
    }
    std::vector<GroupElement> head;  // a_1, b_1, ..., a_{l-1}, b_{l-1}
    for (int i = 0; i < 2 * (ell - 1); ++i) {
      head.push_back(haar_sample(group, derive_seed(attempt_seed, 10 + i)));
    }
    const GroupElement d = haar_sample(group, derive_seed(attempt_seed, 5));
    const GroupElement c = haar_sample(group, derive_seed(attempt_seed, 6));
    Matrix partial = Matrix::Identity(dim, dim);
    for (int i = 0; i + 1 < static_cast<int>(head.size()); i += 2) {
      partial = partial * commutator(head[i], head[i + 1]).mat;
    }
    const Matrix rhs = c.mat * d.mat * c.mat.adjoint() * d.mat;
    const GroupElement target{group, partial.adjoint() * rhs};
    CommutatorSolveOptions cs;
    cs.restarts = opts.restarts;
    cs.max_iters = opts.max_iters;
    cs.accept = opts.tol.eps_rel * 0.5;
    std::vector<GroupElement> entries = std::move(head);
    try {
      auto [a_last, b_last] = solve_commutator(target, derive_seed(attempt_seed, 7), cs);
      entries.push_back(std::move(a_last));
      entries.push_back(std::move(b_last));
    } catch (const NoConvergenceError&) {
      continue;
    }
    entries.push_back(d);
    entries.push_back(c);
    NTuple x{surface, group, std::move(entries), twist};
    if (relation_residual(x) < opts.tol.eps_rel) return x;
  }
  throw SamplingExhaustedError("sample_point: no valid Klein tuple in " +
                               std::to_string(opts.max_attempts) + " attempts");
}

}  // namespace

NTuple sample_point(const SurfacePresentation& surface, const GroupId& group,
                    const GroupElement& twist, std::uint64_t seed,
                    const SampleOptions& opts) {
  if (surface.orientable()) {
    throw Error("sample_point: surface must be nonorientable");
  }
  if (!(twist.group == group)) throw Error("sample_point: twist group mismatch");
  double dist = 0.0;
  center_table(group).nearest(twist.mat, &dist);
  if (dist > 1e-8) throw Error("sample_point: twist is not a center element");
  if (surface.kind == SurfaceKind::RP2Sum) {
    return sample_rp2(surface, group, twist, seed, opts);
  }
  return sample_klein(surface, group, twist, seed, opts);
}

namespace {

template <typename Tuple>
Tuple refine_impl(const Tuple& x, double tol, const std::vector<WordTerm>& terms,
                  std::vector<Matrix> vars,
                  const std::function<Tuple(std::vector<Matrix>)>& rebuild) {
  const double start = relation_residual(x);
  if (!(start < 0.1)) {
    throw std::invalid_argument("refine: residual " + std::to_string(start) +
                                " is too large to polish");
  }
  detail::LmOptions lm;
  lm.max_iters = 100;
  lm.tol = tol * 0.25;
  detail::LmResult res = detail::lm_minimize(x.group, terms, std::move(vars), lm);
  Tuple out = rebuild(std::move(res.vars));
  if (!(relation_residual(out) < tol)) {
    throw NoConvergenceError("refine: stalled at residual " +
                             std::to_string(relation_residual(out)));
  }
  return out;
}

}  // namespace

NTuple refine(const NTuple& x, double tol) {
  check_shape(x);
  const auto terms =
      detail_words::ntuple_terms(x.surface, x.group.matrix_dim(), x.twist.mat);
  std::function<NTuple(std::vector<Matrix>)> rebuild = [&x](std::vector<Matrix> vars) {
    NTuple out = x;
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
      out.entries[i] = project_to_group(vars[i], x.group);
    }
    return out;
  };
  return refine_impl<NTuple>(x, tol, terms, detail_words::entry_matrices(x.entries),
                             rebuild);
}

DoubledTuple refine(const DoubledTuple& x, double tol) {
  check_shape(x);
  const auto terms = detail_words::doubled_terms(x.surface, x.group.matrix_dim());
  auto vars = detail_words::entry_matrices(x.plus_entries);
  for (const GroupElement& e : x.minus_entries) vars.push_back(e.mat);
  const int m = x.surface.entry_count();
  std::function<DoubledTuple(std::vector<Matrix>)> rebuild =
      [&x, m](std::vector<Matrix> vars_out) {
        DoubledTuple out = x;
        for (int i = 0; i < m; ++i) {
          out.plus_entries[i] = project_to_group(vars_out[i], x.group);
          out.minus_entries[i] = project_to_group(vars_out[m + i], x.group);
        }
        return out;
      };
  return refine_impl<DoubledTuple>(x, tol, terms, std::move(vars), rebuild);
}

}  // namespace holovar
