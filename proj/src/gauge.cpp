#include "holovar/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "holovar/errors.hpp"
#include "holovar/rng.hpp"
#include "optim.hpp"

namespace holovar {

using detail::Letter;
using detail::WordTerm;

GaugePair identity_gauge_pair(const GroupId& group) {
  return {identity_element(group), identity_element(group)};
}

GaugePair haar_gauge_pair(const GroupId& group, std::uint64_t seed) {
  return {haar_sample(group, derive_seed(seed, 0)), haar_sample(group, derive_seed(seed, 1))};
}

GaugePair compose(const GaugePair& outer, const GaugePair& inner) {
  return {{outer.g1.group, outer.g1.mat * inner.g1.mat},
          {outer.g2.group, outer.g2.mat * inner.g2.mat}};
}

namespace {

Matrix conj_by(const Matrix& g, const Matrix& x) { return g * x * g.adjoint(); }

}  // namespace

DoubledTuple apply_action(const GaugePair& k, const DoubledTuple& x) {
  if (!(k.g1.group == x.group)) throw Error("apply_action: group mismatch");
  DoubledTuple out = x;
  const int m = static_cast<int>(x.plus_entries.size());
  for (int i = 0; i < m - 1; ++i) {
    out.plus_entries[i].mat = conj_by(k.g1.mat, x.plus_entries[i].mat);
    out.minus_entries[i].mat = conj_by(k.g2.mat, x.minus_entries[i].mat);
  }
  out.plus_entries[m - 1].mat = k.g1.mat * x.plus_entries[m - 1].mat * k.g2.mat.adjoint();
  out.minus_entries[m - 1].mat = k.g2.mat * x.minus_entries[m - 1].mat * k.g1.mat.adjoint();
  return out;
}

NTuple apply_diagonal_action(const GroupElement& g, const NTuple& x) {
  if (!(g.group == x.group)) throw Error("apply_diagonal_action: group mismatch");
  NTuple out = x;
  for (std::size_t i = 0; i < x.entries.size(); ++i) {
    out.entries[i].mat = conj_by(g.mat, x.entries[i].mat);
  }
  return out;
}

std::vector<Complex> word_trace_invariants(std::span<const GroupElement> entries,
                                           int max_word_length) {
  if (max_word_length < 1 || max_word_length > 6) {
    throw Error("word_trace_invariants: length bound must be in [1, 6]");
  }
  const int m = static_cast<int>(entries.size());
  if (m == 0) return {};
  const int alphabet = 2 * m;
  std::vector<Matrix> letters(alphabet);
  for (int i = 0; i < m; ++i) {
    letters[i] = entries[i].mat;
    letters[m + i] = entries[i].mat.adjoint();
  }
  // Block starts: length-l words occupy [start[l], start[l] + alphabet^l).
  std::vector<std::size_t> start(max_word_length + 2, 0);
  std::size_t pow = alphabet;
  for (int len = 1; len <= max_word_length; ++len) {
    start[len + 1] = start[len] + pow;
    pow *= alphabet;
  }
  std::vector<Complex> out(start[max_word_length + 1]);
  // Depth-first over the word tree with running products; results land at
  // by-length lexicographic positions.
  struct Walker {
    const std::vector<Matrix>& letters;
    std::vector<Complex>& out;
    const std::vector<std::size_t>& start;
    int alphabet;
    int max_len;

    void walk(const Matrix& prod, std::size_t index, int len) {
      for (int a = 0; a < alphabet; ++a) {
        const Matrix next = prod * letters[a];
        const std::size_t next_index = index * alphabet + a;
        out[start[len + 1] + next_index] = next.trace();
        if (len + 1 < max_len) walk(next, next_index, len + 1);
      }
    }
  };
  Walker walker{letters, out, start, alphabet, max_word_length};
  const int dim = static_cast<int>(entries[0].mat.rows());
  walker.walk(Matrix::Identity(dim, dim), 0, 0);
  return out;
}

std::vector<Complex> word_trace_invariants(const NTuple& x, int max_word_length) {
  return word_trace_invariants(std::span<const GroupElement>(x.entries), max_word_length);
}

double invariant_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) throw Error("invariant_distance: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

namespace {

AlignmentResult run_conjugation_lm(std::span<const GroupElement> x,
                                   std::span<const GroupElement> y, const GroupId& group,
                                   std::uint64_t seed, const AlignOptions& opts,
                                   std::span<const GroupElement> hints) {
  const int dim = group.matrix_dim();
  std::vector<WordTerm> terms;
  for (std::size_t i = 0; i < x.size(); ++i) {
    WordTerm t;
    t.letters.push_back(Letter::variable(0, 1));
    t.letters.push_back(Letter::fixed(x[i].mat));
    t.letters.push_back(Letter::variable(0, -1));
    t.right = Matrix::Identity(dim, dim);
    t.offset = y[i].mat;
    terms.push_back(std::move(t));
  }
  detail::MultiStartOptions ms;
  ms.restarts = opts.restarts;
  ms.lm.max_iters = opts.max_iters;
  ms.accept = opts.tol.eps_align * 1e-2;  // polish well below the acceptance gate
  std::vector<std::vector<Matrix>> starts;
  for (const GroupElement& h : hints) starts.push_back({h.mat});
  starts.push_back({Matrix::Identity(dim, dim)});
  int starts_used = 0;
  detail::LmResult best =
      detail::multi_start(group, terms, starts, 1, seed, ms, &starts_used);
  AlignmentResult out;
  out.residual = best.residual;
  out.starts_used = starts_used;
  out.found = best.residual < opts.tol.eps_align;
  if (out.found) out.witness = {project_to_group(best.vars[0], group)};
  return out;
}

}  // namespace

AlignmentResult align_entries_conjugation(std::span<const GroupElement> x,
                                          std::span<const GroupElement> y,
                                          const GroupId& group, std::uint64_t seed,
                                          const AlignOptions& opts,
                                          std::span<const GroupElement> hints) {
  if (x.size() != y.size()) throw Error("align: shape mismatch");
  if (opts.quick_reject) {
    const double d = invariant_distance(word_trace_invariants(x, opts.max_word_length),
                                        word_trace_invariants(y, opts.max_word_length));
    if (d > 10.0 * opts.tol.eps_align) {
      return AlignmentResult{false, {}, d, 0};
    }
  }
  return run_conjugation_lm(x, y, group, seed, opts, hints);
}

AlignmentResult align_conjugation(const NTuple& x, const NTuple& y, std::uint64_t seed,
                                  const AlignOptions& opts,
                                  std::span<const GroupElement> hints) {
  if (!(x.surface == y.surface) || !(x.group == y.group)) {
    throw Error("align_conjugation: tuples are not comparable");
  }
  return align_entries_conjugation(x.entries, y.entries, x.group, seed, opts, hints);
}

namespace {

// Closed-loop invariants of a doubled tuple seen from one basepoint: the
// block holonomies plus the composite arc c * cbar (a loop), which the
// K-action conjugates along with the block.
std::vector<GroupElement> closed_loop_entries(const std::vector<GroupElement>& block,
                                              const std::vector<GroupElement>& other,
                                              const GroupId& group) {
  std::vector<GroupElement> out(block.begin(), block.end() - 1);
  out.push_back({group, block.back().mat * other.back().mat});
  return out;
}

}  // namespace

AlignmentResult align_two_basepoint(const DoubledTuple& x, const DoubledTuple& y,
                                    std::uint64_t seed, const AlignOptions& opts,
                                    std::span<const GaugePair> hints) {
  if (!(x.surface == y.surface) || !(x.group == y.group)) {
    throw Error("align_two_basepoint: tuples are not comparable");
  }
  const GroupId group = x.group;
  const int dim = group.matrix_dim();
  if (opts.quick_reject) {
    const auto xp = closed_loop_entries(x.plus_entries, x.minus_entries, group);
    const auto yp = closed_loop_entries(y.plus_entries, y.minus_entries, group);
    const auto xm = closed_loop_entries(x.minus_entries, x.plus_entries, group);
    const auto ym = closed_loop_entries(y.minus_entries, y.plus_entries, group);
    const double d = std::max(
        invariant_distance(word_trace_invariants(std::span<const GroupElement>(xp), opts.max_word_length),
                           word_trace_invariants(std::span<const GroupElement>(yp), opts.max_word_length)),
        invariant_distance(word_trace_invariants(std::span<const GroupElement>(xm), opts.max_word_length),
                           word_trace_invariants(std::span<const GroupElement>(ym), opts.max_word_length)));
    if (d > 10.0 * opts.tol.eps_align) {
      return AlignmentResult{false, {}, d, 0};
    }
  }
  // Variables: g1 (var 0) and g2 (var 1).
  std::vector<WordTerm> terms;
  const int m = static_cast<int>(x.plus_entries.size());
  auto conj_term = [&](int var, const Matrix& entry, const Matrix& target) {
    WordTerm t;
    t.letters.push_back(Letter::variable(var, 1));
    t.letters.push_back(Letter::fixed(entry));
    t.letters.push_back(Letter::variable(var, -1));
    t.right = Matrix::Identity(dim, dim);
    t.offset = target;
    terms.push_back(std::move(t));
  };
  for (int i = 0; i < m - 1; ++i) {
    conj_term(0, x.plus_entries[i].mat, y.plus_entries[i].mat);
    conj_term(1, x.minus_entries[i].mat, y.minus_entries[i].mat);
  }
  {
    WordTerm t;
    t.letters.push_back(Letter::variable(0, 1));
    t.letters.push_back(Letter::fixed(x.plus_entries[m - 1].mat));
    t.letters.push_back(Letter::variable(1, -1));
    t.right = Matrix::Identity(dim, dim);
    t.offset = y.plus_entries[m - 1].mat;
    terms.push_back(std::move(t));
    WordTerm u;
    u.letters.push_back(Letter::variable(1, 1));
    u.letters.push_back(Letter::fixed(x.minus_entries[m - 1].mat));
    u.letters.push_back(Letter::variable(0, -1));
    u.right = Matrix::Identity(dim, dim);
    u.offset = y.minus_entries[m - 1].mat;
    terms.push_back(std::move(u));
  }
  detail::MultiStartOptions ms;
  ms.restarts = opts.restarts;
  ms.lm.max_iters = opts.max_iters;
  ms.accept = opts.tol.eps_align * 1e-2;
  std::vector<std::vector<Matrix>> starts;
  for (const GaugePair& h : hints) starts.push_back({h.g1.mat, h.g2.mat});
  starts.push_back({Matrix::Identity(dim, dim), Matrix::Identity(dim, dim)});
  int starts_used = 0;
  detail::LmResult best =
      detail::multi_start(group, terms, starts, 2, seed, ms, &starts_used);
  AlignmentResult out;
  out.residual = best.residual;
  out.starts_used = starts_used;
  out.found = best.residual < opts.tol.eps_align;
  if (out.found) {
    out.witness = {project_to_group(best.vars[0], group),
                   project_to_group(best.vars[1], group)};
  }
  return out;
}

namespace {

int kernel_dimension(const Eigen::MatrixXd& m, double sigma_tol) {
  if (m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] >= sigma_tol) ++rank;
  }
  return static_cast<int>(m.cols()) - rank;
}

void fill_block(Eigen::MatrixXd& system, int row_offset, int col_offset,
                const std::vector<Matrix>& basis,
                const std::function<Matrix(const Matrix&)>& op) {
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Matrix image = op(basis[k]);
    int r = row_offset;
    for (int c = 0; c < image.cols(); ++c) {
      for (int rr = 0; rr < image.rows(); ++rr) {
        system(r++, col_offset + static_cast<int>(k)) = image(rr, c).real();
        system(r++, col_offset + static_cast<int>(k)) = image(rr, c).imag();
      }
    }
  }
}

}  // namespace

int stabilizer_dimension(std::span<const GroupElement> entries, double sigma_tol) {
  if (entries.empty()) throw Error("stabilizer_dimension: empty entry list");
  const GroupId group = entries[0].group;
  const std::vector<Matrix>& basis = algebra_basis(group);
  const int d = static_cast<int>(basis.size());
  const int block = 2 * group.matrix_dim() * group.matrix_dim();
  Eigen::MatrixXd system(block * static_cast<int>(entries.size()), d);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Matrix& x = entries[i].mat;
    fill_block(system, block * static_cast<int>(i), 0, basis,
               [&x](const Matrix& e) { return Matrix(x * e * x.adjoint() - e); });
  }
  return kernel_dimension(system, sigma_tol);
}

int stabilizer_dimension(const NTuple& x, double sigma_tol) {
  return stabilizer_dimension(std::span<const GroupElement>(x.entries), sigma_tol);
}

int stabilizer_dimension(const DoubledTuple& x, double sigma_tol) {
  const GroupId group = x.group;
  const std::vector<Matrix>& basis = algebra_basis(group);
  const int d = static_cast<int>(basis.size());
  const int m = static_cast<int>(x.plus_entries.size());
  const int block = 2 * group.matrix_dim() * group.matrix_dim();
  // Unknowns (xi1, xi2); rows: commutant conditions for both blocks plus the
  // two intertwining conditions xi1 c = c xi2 and xi2 c' = c' xi1.
  Eigen::MatrixXd system(block * 2 * m, 2 * d);
  system.setZero();
  int row = 0;
  for (int i = 0; i < m - 1; ++i) {
    const Matrix& v = x.plus_entries[i].mat;
    fill_block(system, row, 0, basis,
               [&v](const Matrix& e) { return Matrix(v * e * v.adjoint() - e); });
    row += block;
    const Matrix& w = x.minus_entries[i].mat;
    fill_block(system, row, d, basis,
               [&w](const Matrix& e) { return Matrix(w * e * w.adjoint() - e); });
    row += block;
  }
  const Matrix& c = x.plus_entries[m - 1].mat;
  fill_block(system, row, 0, basis, [&c](const Matrix& e) { return Matrix(e * c); });
  fill_block(system, row, d, basis, [&c](const Matrix& e) { return Matrix(-(c * e)); });
  row += block;
  const Matrix& cbar = x.minus_entries[m - 1].mat;
  fill_block(system, row, d, basis,
             [&cbar](const Matrix& e) { return Matrix(e * cbar); });
  fill_block(system, row, 0, basis,
             [&cbar](const Matrix& e) { return Matrix(-(cbar * e)); });
  return kernel_dimension(system, sigma_tol);
}

bool is_generic(const NTuple& x, double sigma_tol) {
  return stabilizer_dimension(x, sigma_tol) == 0;
}

bool is_generic(const DoubledTuple& x, double sigma_tol) {
  return stabilizer_dimension(x, sigma_tol) == 0;
}

}  // namespace holovar
