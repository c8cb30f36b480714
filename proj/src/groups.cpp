#include "holovar/groups.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "holovar/rng.hpp"

namespace holovar {

namespace {

const Complex kI(0.0, 1.0);

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::SU: return "su";
    case Family::SO: return "so";
    case Family::Sp: return "sp";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "su" || name == "SU") return Family::SU;
  if (name == "so" || name == "SO") return Family::SO;
  if (name == "sp" || name == "Sp" || name == "SP") return Family::Sp;
  throw Error("unknown group family: " + name);
}

GroupId::GroupId(Family f, int rank) : family(f), n(rank) {
  const int min_rank = f == Family::SU ? 2 : f == Family::SO ? 3 : 1;
  if (rank < min_rank) {
    throw Error(family_name(f) + "(" + std::to_string(rank) + "): rank must be >= " +
                std::to_string(min_rank));
  }
}

int GroupId::algebra_dim() const {
  switch (family) {
    case Family::SU: return n * n - 1;
    case Family::SO: return n * (n - 1) / 2;
    case Family::Sp: return n * (2 * n + 1);
  }
  return 0;
}

std::string GroupId::label() const {
  return family_name(family) + "(" + std::to_string(n) + ")";
}

Matrix symplectic_form(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = identity(n);
  j.bottomLeftCorner(n, n) = -identity(n);
  return j;
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  return (a - b).norm();
}

double group_residual(const Matrix& m, const GroupId& group) {
  const int dim = group.matrix_dim();
  if (m.rows() != dim || m.cols() != dim) return std::numeric_limits<double>::infinity();
  const double unitary = (m.adjoint() * m - identity(dim)).norm();
  switch (group.family) {
    case Family::SU: {
      const double det = std::abs(m.determinant() - Complex(1.0, 0.0));
      return std::max(unitary, det);
    }
    case Family::SO: {
      const double det = std::abs(m.determinant() - Complex(1.0, 0.0));
      const double realness = m.imag().norm();
      return std::max({unitary, det, realness});
    }
    case Family::Sp: {
      const Matrix j = symplectic_form(group.n);
      const double sympl = (m.transpose() * j * m - j).norm();
      return std::max(unitary, sympl);
    }
  }
  return std::numeric_limits<double>::infinity();
}

double algebra_residual(const Matrix& m, const GroupId& group) {
  const int dim = group.matrix_dim();
  if (m.rows() != dim || m.cols() != dim) return std::numeric_limits<double>::infinity();
  const double anti_herm = (m + m.adjoint()).norm();
  switch (group.family) {
    case Family::SU:
      return std::max(anti_herm, std::abs(m.trace()));
    case Family::SO:
      return std::max(anti_herm, m.imag().norm());
    case Family::Sp: {
      const Matrix j = symplectic_form(group.n);
      // Quaternionic compatibility X = -J conj(X) J, the linearization of the
      // group condition U J = J conj(U).
      return std::max(anti_herm, (m + j * m.conjugate() * j).norm());
    }
  }
  return std::numeric_limits<double>::infinity();
}

GroupElement GroupElement::checked(const GroupId& group, Matrix m, double eps) {
  const double res = group_residual(m, group);
  if (!(res < eps)) {
    throw InvalidElementError("matrix is not in " + group.label() + " (residual " +
                              std::to_string(res) + ")");
  }
  return {group, std::move(m)};
}

GroupElement identity_element(const GroupId& group) {
  return {group, identity(group.matrix_dim())};
}

namespace {

// Basis matrices are normalized so that Re tr(X* Y) = delta_xy.
std::vector<Matrix> build_basis(const GroupId& g) {
  std::vector<Matrix> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  if (g.family == Family::SU) {
    const int n = g.n;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Matrix a = Matrix::Zero(n, n);
        a(i, j) = inv_sqrt2;
        a(j, i) = -inv_sqrt2;
        basis.push_back(a);
        Matrix b = Matrix::Zero(n, n);
        b(i, j) = kI * inv_sqrt2;
        b(j, i) = kI * inv_sqrt2;
        basis.push_back(b);
      }
    }
    for (int k = 1; k < n; ++k) {
      Matrix d = Matrix::Zero(n, n);
      const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
      for (int i = 0; i < k; ++i) d(i, i) = kI * scale;
      d(k, k) = -kI * scale * static_cast<double>(k);
      basis.push_back(d);
    }
  } else if (g.family == Family::SO) {
    const int n = g.n;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Matrix a = Matrix::Zero(n, n);
        a(i, j) = inv_sqrt2;
        a(j, i) = -inv_sqrt2;
        basis.push_back(a);
      }
    }
  } else {
    // sp(n) in complex form: [[A, B], [-conj(B), conj(A)]] with A
    // anti-Hermitian and B complex symmetric.
    const int n = g.n;
    auto embed_a = [&](const Matrix& a) {
      Matrix x = Matrix::Zero(2 * n, 2 * n);
      x.topLeftCorner(n, n) = a;
      x.bottomRightCorner(n, n) = a.conjugate();
      return Matrix(x * inv_sqrt2);
    };
    auto embed_b = [&](const Matrix& b) {
      Matrix x = Matrix::Zero(2 * n, 2 * n);
      x.topRightCorner(n, n) = b;
      x.bottomLeftCorner(n, n) = -b.conjugate();
      return Matrix(x * inv_sqrt2);
    };
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Matrix a = Matrix::Zero(n, n);
        a(i, j) = inv_sqrt2;
        a(j, i) = -inv_sqrt2;
        basis.push_back(embed_a(a));
        Matrix b = Matrix::Zero(n, n);
        b(i, j) = kI * inv_sqrt2;
        b(j, i) = kI * inv_sqrt2;
        basis.push_back(embed_a(b));
      }
    }
    for (int k = 0; k < n; ++k) {
      Matrix d = Matrix::Zero(n, n);
      d(k, k) = kI;
      basis.push_back(embed_a(d));
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Matrix s = Matrix::Zero(n, n);
        if (i == j) {
          s(i, i) = 1.0;
          basis.push_back(embed_b(s));
          s(i, i) = kI;
          basis.push_back(embed_b(s));
        } else {
          s(i, j) = inv_sqrt2;
          s(j, i) = inv_sqrt2;
          basis.push_back(embed_b(s));
          s(i, j) = kI * inv_sqrt2;
          s(j, i) = kI * inv_sqrt2;
          basis.push_back(embed_b(s));
        }
      }
    }
  }
  return basis;
}

}  // namespace

const std::vector<Matrix>& algebra_basis(const GroupId& group) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<Matrix>> cache;
  const std::pair<int, int> key{static_cast<int>(group.family), group.n};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, build_basis(group)).first;
  }
  return it->second;
}

namespace {

// Two-pass modified Gram-Schmidt, normalizing by positive real norms.  The
// positive-diagonal convention is the measure-theoretic phase correction:
// left translation by a fixed group element commutes with it.
void gram_schmidt(Matrix& m) {
  const int n = static_cast<int>(m.cols());
  for (int j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < j; ++k) {
        const Complex proj = m.col(k).dot(m.col(j));
        m.col(j) -= proj * m.col(k);
      }
    }
    m.col(j) /= m.col(j).norm();
  }
}

GroupElement haar_su(const GroupId& g, Rng& rng) {
  const int n = g.n;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
  gram_schmidt(m);
  const Complex det = m.determinant();
  m.col(0) *= std::conj(det) / std::abs(det);
  return {g, m};
}

GroupElement haar_so(const GroupId& g, Rng& rng) {
  const int n = g.n;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
  Matrix mc = m.cast<Complex>();
  gram_schmidt(mc);
  Eigen::MatrixXd q = mc.real();
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return {g, q.cast<Complex>()};
}

// Quaternionic Gram-Schmidt: orthonormalize the first n columns against each
// previous column u and its antiunitary partner psi(u) = J conj(u); the
// partner columns then come along for free via the block structure.
GroupElement haar_sp(const GroupId& g, Rng& rng) {
  const int n = g.n;
  const int dim = 2 * n;
  const Matrix j = symplectic_form(n);
  Matrix ginibre(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) ginibre(r, c) = rng.complex_normal();
  // Project onto the quaternionic structure M J = J conj(M).
  Matrix m = 0.5 * (ginibre - j * ginibre.conjugate() * j);
  Matrix u = Matrix::Zero(dim, dim);
  for (int col = 0; col < n; ++col) {
    Eigen::VectorXcd v = m.col(col);
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < col; ++k) {
        v -= u.col(k).dot(v) * u.col(k);
        v -= u.col(k + n).dot(v) * u.col(k + n);
      }
    }
    v /= v.norm();
    u.col(col) = v;
    u.col(col + n) = -(j * v.conjugate());
  }
  return {g, u};
}

}  // namespace

GroupElement haar_sample(const GroupId& group, std::uint64_t seed) {
  Rng rng(seed);
  switch (group.family) {
    case Family::SU: return haar_su(group, rng);
    case Family::SO: return haar_so(group, rng);
    case Family::Sp: return haar_sp(group, rng);
  }
  throw Error("unreachable");
}

GroupElement project_to_group(const Matrix& m, const GroupId& group) {
  const int dim = group.matrix_dim();
  if (m.rows() != dim || m.cols() != dim) {
    throw Error("project_to_group: wrong shape for " + group.label());
  }
  Matrix work = m;
  if (group.family == Family::SO) {
    work = work.real().cast<Complex>();
  } else if (group.family == Family::Sp) {
    const Matrix j = symplectic_form(group.n);
    work = 0.5 * (work - j * work.conjugate() * j);
  }
  Eigen::JacobiSVD<Matrix> svd(work, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < 1e-8) {
    throw SingularProjectionError("polar factor is rank-deficient");
  }
  Matrix q = svd.matrixU() * svd.matrixV().adjoint();
  switch (group.family) {
    case Family::SU: {
      const Complex det = q.determinant();
      q.col(0) *= std::conj(det) / std::abs(det);
      break;
    }
    case Family::SO: {
      Eigen::MatrixXd qr = q.real();
      if (qr.determinant() < 0.0) qr.col(0) *= -1.0;
      q = qr.cast<Complex>();
      break;
    }
    case Family::Sp:
      // Polar factor of a quaternionic matrix is symplectic already.
      break;
  }
  return {group, q};
}

GroupElement commutator(const GroupElement& a, const GroupElement& b) {
  if (!(a.group == b.group)) throw Error("commutator: mismatched groups");
  return {a.group, a.mat * b.mat * a.mat.adjoint() * b.mat.adjoint()};
}

namespace {

struct UnitaryEigen {
  Eigen::VectorXd angles;  // in (-pi, pi]
  Matrix vectors;          // unitary
};

// Eigen-decomposition of a (normal) group element via complex Schur; the
// triangular factor of a normal matrix is diagonal up to roundoff.
UnitaryEigen unitary_eigensystem(const Matrix& m) {
  Eigen::ComplexSchur<Matrix> schur(m);
  const int dim = static_cast<int>(m.rows());
  UnitaryEigen out;
  out.angles.resize(dim);
  for (int i = 0; i < dim; ++i) {
    out.angles[i] = std::arg(schur.matrixT()(i, i));
  }
  out.vectors = schur.matrixU();
  return out;
}

void check_branch(const Eigen::VectorXd& angles, double delta_branch) {
  for (int i = 0; i < angles.size(); ++i) {
    if (M_PI - std::abs(angles[i]) < delta_branch) {
      throw BranchCutError("eigenvalue within " + std::to_string(delta_branch) +
                           " of the -1 branch cut");
    }
  }
}

// For SU(n) the principal angles sum to a multiple of 2*pi, not necessarily
// zero.  Shift whole branches (largest angles down, smallest up) until the
// sum vanishes, so the log lands in su(n) and exp of half of it has unit
// determinant.
void balance_su_angles(Eigen::VectorXd& angles) {
  const double two_pi = 2.0 * M_PI;
  long wind = std::lround(angles.sum() / two_pi);
  while (wind > 0) {
    int idx = 0;
    angles.maxCoeff(&idx);
    angles[idx] -= two_pi;
    --wind;
  }
  while (wind < 0) {
    int idx = 0;
    angles.minCoeff(&idx);
    angles[idx] += two_pi;
    ++wind;
  }
}

Matrix project_algebra(const Matrix& m, const GroupId& group) {
  Matrix x = 0.5 * (m - m.adjoint());
  switch (group.family) {
    case Family::SU:
      x -= (x.trace() / static_cast<double>(x.rows())) *
           Matrix::Identity(x.rows(), x.cols());
      break;
    case Family::SO:
      x = x.real().cast<Complex>();
      x = 0.5 * (x - x.transpose());
      break;
    case Family::Sp: {
      const Matrix j = symplectic_form(group.n);
      x = 0.5 * (x - j * x.conjugate() * j);
      break;
    }
  }
  return x;
}

}  // namespace

AlgebraElement group_log(const GroupElement& x, double delta_branch) {
  UnitaryEigen eig = unitary_eigensystem(x.mat);
  check_branch(eig.angles, delta_branch);
  if (x.group.family == Family::SU) balance_su_angles(eig.angles);
  Matrix diag = Matrix::Zero(eig.angles.size(), eig.angles.size());
  for (int i = 0; i < eig.angles.size(); ++i) diag(i, i) = kI * eig.angles[i];
  Matrix log = eig.vectors * diag * eig.vectors.adjoint();
  // SU angle sums are exact multiples of 2*pi after balancing, so the
  // projection only removes roundoff.
  return {x.group, project_algebra(log, x.group)};
}

GroupElement group_exp(const AlgebraElement& x) {
  // i*X is Hermitian for anti-Hermitian X; the self-adjoint eigensolver keeps
  // the result unitary to machine precision.
  const Matrix herm = kI * x.mat;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(herm);
  const int dim = static_cast<int>(x.mat.rows());
  Matrix diag = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    diag(i, i) = std::exp(-kI * eig.eigenvalues()[i]);
  }
  Matrix out = eig.eigenvectors() * diag * eig.eigenvectors().adjoint();
  if (x.group.family == Family::SO) out = out.real().cast<Complex>();
  return {x.group, out};
}

GroupElement principal_square_root(const GroupElement& w, double delta_branch) {
  AlgebraElement log = group_log(w, delta_branch);
  log.mat *= 0.5;
  return group_exp(log);
}

namespace {

GroupElement scalar_element(const GroupId& g, Complex scale) {
  return {g, scale * Matrix::Identity(g.matrix_dim(), g.matrix_dim())};
}

}  // namespace

CenterTable center_table(const GroupId& group) {
  CenterTable table{group, {}, {}, {}, {}, {}, {}};
  switch (group.family) {
    case Family::SU: {
      for (int k = 0; k < group.n; ++k) {
        const double angle = 2.0 * M_PI * k / group.n;
        table.elements.push_back(scalar_element(group, std::polar(1.0, angle)));
      }
      break;
    }
    case Family::SO: {
      table.elements.push_back(identity_element(group));
      if (group.n % 2 == 0) table.elements.push_back(scalar_element(group, -1.0));
      break;
    }
    case Family::Sp: {
      table.elements.push_back(identity_element(group));
      table.elements.push_back(scalar_element(group, -1.0));
      break;
    }
  }
  const int size = static_cast<int>(table.elements.size());
  table.square_index.resize(size);
  for (int i = 0; i < size; ++i) {
    const Matrix sq = table.elements[i].mat * table.elements[i].mat;
    table.square_index[i] = table.nearest(sq);
  }
  for (int i = 0; i < size; ++i) {
    const int s = table.square_index[i];
    if (std::find(table.two_center.begin(), table.two_center.end(), s) ==
        table.two_center.end()) {
      table.two_center.push_back(s);
    }
    if (s == 0) table.sqrt_of_identity.push_back(i);
  }
  std::sort(table.two_center.begin(), table.two_center.end());
  // Cosets of 2Z(G); the class containing the identity comes first.
  table.class_of.assign(size, -1);
  for (int i = 0; i < size; ++i) {
    if (table.class_of[i] >= 0) continue;
    const int cls = static_cast<int>(table.quotient_classes.size());
    std::vector<int> members;
    for (int t : table.two_center) {
      const Matrix prod = table.elements[i].mat * table.elements[t].mat;
      const int idx = table.nearest(prod);
      if (table.class_of[idx] < 0) {
        table.class_of[idx] = cls;
        members.push_back(idx);
      }
    }
    std::sort(members.begin(), members.end());
    table.quotient_classes.push_back(std::move(members));
  }
  return table;
}

int CenterTable::nearest(const Matrix& m, double* dist) const {
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const double d = frobenius_distance(m, elements[i].mat);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  if (dist != nullptr) *dist = best_dist;
  return best;
}

AbstractCenterSummary abstract_center_quotient(const std::vector<int>& invariant_factors) {
  if (invariant_factors.empty()) {
    throw Error("abstract_center_quotient: need at least one invariant factor");
  }
  for (int f : invariant_factors) {
    if (f < 2) throw Error("abstract_center_quotient: factors must be >= 2");
  }
  AbstractCenterSummary out;
  out.invariant_factors = invariant_factors;
  out.order = 1;
  for (int f : invariant_factors) out.order *= f;
  // Direct enumeration of g -> 2g over the product of cyclic groups.
  const int rank = static_cast<int>(invariant_factors.size());
  std::vector<int> g(rank, 0);
  std::vector<std::vector<int>> doubles;
  long kernel = 0;
  for (long count = 0; count < out.order; ++count) {
    std::vector<int> d(rank);
    bool in_kernel = true;
    for (int i = 0; i < rank; ++i) {
      d[i] = (2 * g[i]) % invariant_factors[i];
      if (d[i] != 0) in_kernel = false;
    }
    if (in_kernel) ++kernel;
    if (std::find(doubles.begin(), doubles.end(), d) == doubles.end()) {
      doubles.push_back(d);
    }
    for (int i = 0; i < rank; ++i) {
      if (++g[i] < invariant_factors[i]) break;
      g[i] = 0;
    }
  }
  out.two_subgroup_order = static_cast<long>(doubles.size());
  out.quotient_order = out.order / out.two_subgroup_order;
  out.sqrt_identity_count = kernel;
  return out;
}

}  // namespace holovar
