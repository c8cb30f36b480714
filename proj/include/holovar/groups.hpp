#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "holovar/config.hpp"
#include "holovar/errors.hpp"

namespace holovar {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

enum class Family { SU, SO, Sp };

std::string family_name(Family f);
Family parse_family(const std::string& name);

// A compact matrix group from the supported list: SU(n) n>=2, SO(n) n>=3,
// Sp(n) n>=1 (realized as 2n x 2n complex unitaries preserving the standard
// skew form).
struct GroupId {
  Family family;
  int n;

  GroupId(Family f, int rank);

  int matrix_dim() const { return family == Family::Sp ? 2 * n : n; }
  int algebra_dim() const;
  std::string label() const;

  friend bool operator==(const GroupId& a, const GroupId& b) {
    return a.family == b.family && a.n == b.n;
  }
};

// The standard skew form J for Sp(n), as a 2n x 2n matrix.
Matrix symplectic_form(int n);

// Residual of the defining equations (unitarity/orthogonality, determinant,
// symplectic compatibility); zero exactly on the group.
double group_residual(const Matrix& m, const GroupId& group);

// A matrix certified (within eps) to lie in its group.
struct GroupElement {
  GroupId group;
  Matrix mat;

  // Checked factory for API boundaries (deserialization, user input).
  static GroupElement checked(const GroupId& group, Matrix m,
                              double eps = Tolerances{}.eps_group);

  GroupElement inverse() const { return {group, mat.adjoint()}; }
};

GroupElement identity_element(const GroupId& group);

// Anti-Hermitian traceless (SU), real antisymmetric (SO), or anti-Hermitian
// quaternionic (Sp) tangent data.
struct AlgebraElement {
  GroupId group;
  Matrix mat;
};

double algebra_residual(const Matrix& m, const GroupId& group);

// Orthonormal basis of the Lie algebra under <X,Y> = Re tr(X* Y); cached.
const std::vector<Matrix>& algebra_basis(const GroupId& group);

// Haar-distributed sample, deterministic for a fixed seed.  Realized by
// two-pass Gram-Schmidt of a Gaussian matrix with a determinant correction
// (SU/SO) or quaternionic Gram-Schmidt (Sp); the correction commutes with
// left translation, which is what makes the pushforward Haar.
GroupElement haar_sample(const GroupId& group, std::uint64_t seed);

// Nearest-point projection by polar decomposition plus determinant/phase
// correction; idempotent on group elements.  Throws SingularProjectionError
// on a rank-deficient polar factor.
GroupElement project_to_group(const Matrix& m, const GroupId& group);

// aba^{-1}b^{-1}.
GroupElement commutator(const GroupElement& a, const GroupElement& b);

// Principal logarithm with the branch chosen inside the Lie algebra (for
// SU(n) the eigenvalue angles are balanced so the result is traceless).
// Throws BranchCutError if an eigenvalue is within delta_branch of -1.
AlgebraElement group_log(const GroupElement& x,
                         double delta_branch = Tolerances{}.delta_branch);

GroupElement group_exp(const AlgebraElement& x);

// c with c^2 = w, staying in the group; same branch-cut condition as the log.
GroupElement principal_square_root(
    const GroupElement& w, double delta_branch = Tolerances{}.delta_branch);

// The finite center Z(G), its subgroup of squares 2Z(G), the quotient
// partition, and the square roots of the identity inside Z(G).
struct CenterTable {
  GroupId group;
  std::vector<GroupElement> elements;  // identity first
  std::vector<int> square_index;       // elements[i]^2 == elements[square_index[i]]
  std::vector<int> two_center;         // indices forming 2Z(G)
  std::vector<std::vector<int>> quotient_classes;  // cosets of 2Z(G); class 0 holds e
  std::vector<int> class_of;           // element index -> class index
  std::vector<int> sqrt_of_identity;   // indices s with s^2 = e

  int identity_index() const { return 0; }
  int size() const { return static_cast<int>(elements.size()); }
  // Index of the nearest central element; optionally reports the distance.
  int nearest(const Matrix& m, double* dist = nullptr) const;
};

CenterTable center_table(const GroupId& group);

// Center arithmetic for an abstract finite abelian group given as invariant
// factors; covers groups (like Spin(n)) with no matrix realization here.
struct AbstractCenterSummary {
  std::vector<int> invariant_factors;
  long order = 0;
  long two_subgroup_order = 0;   // |2Z|
  long quotient_order = 0;       // |Z/2Z|
  long sqrt_identity_count = 0;  // |ker(g -> g^2)|
};

AbstractCenterSummary abstract_center_quotient(const std::vector<int>& invariant_factors);

// Frobenius distance between same-shaped matrices.
double frobenius_distance(const Matrix& a, const Matrix& b);

}  // namespace holovar
