#pragma once

// Internal least-squares machinery shared by the samplers, the gauge
// aligners, and the Newton polish.  Residual blocks are short words in the
// variables (group elements) and constant matrices; steps move along the
// group via exp of algebra directions, so iterates never leave the manifold.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "holovar/groups.hpp"
#include "holovar/rng.hpp"

namespace holovar::detail {

struct Letter {
  int var = -1;  // -1 marks a constant letter
  int exponent = 1;
  Matrix constant;

  static Letter variable(int v, int e = 1) { return {v, e, {}}; }
  static Letter fixed(Matrix m) { return {-1, 1, std::move(m)}; }
};

// One residual block: eval(letters) * right - offset.
struct WordTerm {
  std::vector<Letter> letters;
  Matrix right;
  Matrix offset;
};

inline void append_commutator(std::vector<Letter>& letters, int a, int b) {
  letters.push_back(Letter::variable(a, 1));
  letters.push_back(Letter::variable(b, 1));
  letters.push_back(Letter::variable(a, -1));
  letters.push_back(Letter::variable(b, -1));
}

inline Matrix letter_matrix(const Letter& l, const std::vector<Matrix>& vars) {
  if (l.var < 0) return l.constant;
  return l.exponent > 0 ? vars[l.var] : Matrix(vars[l.var].adjoint());
}

inline Matrix eval_word(const WordTerm& term, const std::vector<Matrix>& vars) {
  const int dim = static_cast<int>(term.right.rows());
  Matrix prod = Matrix::Identity(dim, dim);
  for (const Letter& l : term.letters) prod = prod * letter_matrix(l, vars);
  return prod * term.right - term.offset;
}

// Derivative of eval_word under vars[v] -> exp(t X) vars[v] at t = 0.
inline Matrix eval_word_derivative(const WordTerm& term, const std::vector<Matrix>& vars,
                                   int v, const Matrix& x) {
  const int len = static_cast<int>(term.letters.size());
  const int dim = static_cast<int>(term.right.rows());
  std::vector<Matrix> letter(len);
  for (int i = 0; i < len; ++i) letter[i] = letter_matrix(term.letters[i], vars);
  std::vector<Matrix> prefix(len + 1), suffix(len + 1);
  prefix[0] = Matrix::Identity(dim, dim);
  for (int i = 0; i < len; ++i) prefix[i + 1] = prefix[i] * letter[i];
  suffix[len] = Matrix::Identity(dim, dim);
  for (int i = len - 1; i >= 0; --i) suffix[i] = letter[i] * suffix[i + 1];
  Matrix d = Matrix::Zero(dim, dim);
  for (int i = 0; i < len; ++i) {
    const Letter& l = term.letters[i];
    if (l.var != v) continue;
    // d(g) = X g ; d(g^{-1}) = -g^{-1} X.
    const Matrix dl = l.exponent > 0 ? Matrix(x * letter[i]) : Matrix(-letter[i] * x);
    d += prefix[i] * dl * suffix[i + 1];
  }
  return d * term.right;
}

inline void stack_real(const Matrix& m, Eigen::VectorXd& out, int& offset) {
  for (int c = 0; c < m.cols(); ++c) {
    for (int r = 0; r < m.rows(); ++r) {
      out[offset++] = m(r, c).real();
      out[offset++] = m(r, c).imag();
    }
  }
}

struct LmOptions {
  int max_iters = 500;
  double tol = 1e-12;
  double lambda0 = 1e-4;
};

struct LmResult {
  std::vector<Matrix> vars;
  double residual = 0.0;  // Euclidean norm of the stacked real residual
  int iters = 0;
  bool converged = false;
};

inline double stacked_norm(const std::vector<WordTerm>& terms, const std::vector<Matrix>& vars) {
  double sq = 0.0;
  for (const WordTerm& t : terms) sq += eval_word(t, vars).squaredNorm();
  return std::sqrt(sq);
}

inline LmResult lm_minimize(const GroupId& group, const std::vector<WordTerm>& terms,
                            std::vector<Matrix> vars, const LmOptions& opts) {
  const std::vector<Matrix>& basis = algebra_basis(group);
  const int d = static_cast<int>(basis.size());
  const int nv = static_cast<int>(vars.size());
  const int params = nv * d;
  int rows = 0;
  for (const WordTerm& t : terms) rows += 2 * static_cast<int>(t.right.size());

  Eigen::VectorXd r(rows);
  Eigen::MatrixXd jac(rows, params);
  double lambda = opts.lambda0;
  double norm = stacked_norm(terms, vars);
  LmResult result{vars, norm, 0, norm < opts.tol};
  if (result.converged) return result;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    int off = 0;
    for (const WordTerm& t : terms) stack_real(eval_word(t, vars), r, off);
    for (int v = 0; v < nv; ++v) {
      for (int k = 0; k < d; ++k) {
        int column_off = 0;
        Eigen::VectorXd col(rows);
        for (const WordTerm& t : terms) {
          stack_real(eval_word_derivative(t, vars, v, basis[k]), col, column_off);
        }
        jac.col(v * d + k) = col;
      }
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    bool stepped = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd delta = damped.ldlt().solve(-jtr);
      std::vector<Matrix> cand = vars;
      for (int v = 0; v < nv; ++v) {
        Matrix x = Matrix::Zero(group.matrix_dim(), group.matrix_dim());
        for (int k = 0; k < d; ++k) x += delta[v * d + k] * basis[k];
        cand[v] = group_exp({group, x}).mat * cand[v];
      }
      const double cand_norm = stacked_norm(terms, cand);
      if (cand_norm < norm) {
        vars = std::move(cand);
        norm = cand_norm;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        break;
      }
      lambda = std::min(lambda * 4.0, 1e8);
    }
    result.iters = iter + 1;
    if (norm < opts.tol) break;
    if (!stepped) break;  // stalled
  }
  result.vars = std::move(vars);
  result.residual = norm;
  result.converged = norm < opts.tol;
  return result;
}

struct MultiStartOptions {
  int restarts = 20;
  LmOptions lm;
  double accept = 1e-8;
};

// Runs LM from the hint starts first, then from Haar-random starts derived
// from the seed; returns as soon as a start reaches the accept threshold.
inline LmResult multi_start(const GroupId& group, const std::vector<WordTerm>& terms,
                            const std::vector<std::vector<Matrix>>& hints, int num_vars,
                            std::uint64_t seed, const MultiStartOptions& opts,
                            int* starts_used = nullptr) {
  LmResult best;
  best.residual = std::numeric_limits<double>::infinity();
  int used = 0;
  auto try_start = [&](std::vector<Matrix> start) {
    ++used;
    LmResult r = lm_minimize(group, terms, std::move(start), opts.lm);
    if (r.residual < best.residual) best = std::move(r);
    return best.residual < opts.accept;
  };
  bool done = false;
  for (const auto& h : hints) {
    if ((done = try_start(h))) break;
  }
  for (int s = 0; !done && s < opts.restarts; ++s) {
    std::vector<Matrix> start;
    start.reserve(num_vars);
    for (int v = 0; v < num_vars; ++v) {
      start.push_back(haar_sample(group, derive_seed(seed, s * num_vars + v)).mat);
    }
    done = try_start(std::move(start));
  }
  if (starts_used != nullptr) *starts_used = used;
  return best;
}

}  // namespace holovar::detail
