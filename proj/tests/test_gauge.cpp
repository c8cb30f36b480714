#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "holovar/gauge.hpp"
#include "holovar/rng.hpp"

using namespace holovar;

namespace {

const GroupId kSu2(Family::SU, 2);
const SurfacePresentation kRp2_1(SurfaceKind::RP2Sum, 1);

NTuple sample_rp2(std::uint64_t seed, int twist = 0) {
  const CenterTable table = center_table(kSu2);
  return sample_point(kRp2_1, kSu2, table.elements[twist], seed);
}

Matrix diag_i() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = Complex(0, 1);
  m(1, 1) = Complex(0, -1);
  return m;
}

Matrix rot90() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  m(1, 0) = -1;
  return m;
}

}  // namespace

TEST_CASE("apply_action identities") {
  const NTuple x = sample_rp2(1);
  const DoubledTuple dx = diagonal_embed(x);
  CHECK(tuple_distance(apply_action(identity_gauge_pair(kSu2), dx), dx) == 0.0);

  // k = (e, r) with r^2 = e sends (V, c, V, c) to (V, cr, V, cr).
  const CenterTable table = center_table(kSu2);
  const GaugePair k{identity_element(kSu2), table.elements[1]};
  const DoubledTuple moved = apply_action(k, dx);
  DoubledTuple expected = dx;
  expected.plus_entries.back().mat = dx.plus_entries.back().mat * table.elements[1].mat;
  expected.minus_entries.back().mat = table.elements[1].mat * dx.minus_entries.back().mat;
  CHECK(tuple_distance(moved, expected) < 1e-14);
  CHECK(frobenius_distance(moved.plus_entries.back().mat, moved.minus_entries.back().mat) <
        1e-14);

  for (int trial = 0; trial < 100; ++trial) {
    const DoubledTuple y = diagonal_embed(sample_rp2(derive_seed(2, trial), trial % 2));
    const GaugePair g = haar_gauge_pair(kSu2, derive_seed(3, trial));
    CHECK(relation_residual(apply_action(g, y)) < 10 * Tolerances{}.eps_rel);
  }
}

TEST_CASE("apply_action composes as a group action") {
  const DoubledTuple dx = diagonal_embed(sample_rp2(5));
  for (int trial = 0; trial < 100; ++trial) {
    const GaugePair k1 = haar_gauge_pair(kSu2, derive_seed(6, trial));
    const GaugePair k2 = haar_gauge_pair(kSu2, derive_seed(7, trial));
    const DoubledTuple lhs = apply_action(k2, apply_action(k1, dx));
    const DoubledTuple rhs = apply_action(compose(k2, k1), dx);
    CHECK(tuple_distance(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("diagonal action fixes central elements and preserves residuals") {
  const NTuple x = sample_rp2(8);
  CHECK(tuple_distance(apply_diagonal_action(identity_element(kSu2), x), x) == 0.0);
  const CenterTable table = center_table(kSu2);
  CHECK(tuple_distance(apply_diagonal_action(table.elements[1], x), x) < 1e-14);
  for (int trial = 0; trial < 100; ++trial) {
    const GroupElement g = haar_sample(kSu2, derive_seed(9, trial));
    CHECK(relation_residual(apply_diagonal_action(g, x)) < 10 * Tolerances{}.eps_rel);
  }
}

TEST_CASE("word trace invariants") {
  // All-identity tuple: every length-1 trace is the matrix dimension.
  std::vector<GroupElement> ids(3, identity_element(kSu2));
  const auto inv = word_trace_invariants(std::span<const GroupElement>(ids), 1);
  REQUIRE(inv.size() == 6);
  for (const Complex& t : inv) CHECK(std::abs(t - Complex(2, 0)) < 1e-14);

  const NTuple x = sample_rp2(10);
  const GroupElement g = haar_sample(kSu2, 11);
  const auto a = word_trace_invariants(x, 3);
  const auto b = word_trace_invariants(apply_diagonal_action(g, x), 3);
  CHECK(invariant_distance(a, b) < 1e-10);

  int separated = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = word_trace_invariants(sample_rp2(derive_seed(12, trial)), 3);
    const auto v = word_trace_invariants(sample_rp2(derive_seed(13, trial)), 3);
    if (invariant_distance(u, v) > 0.1) ++separated;
  }
  CHECK(separated == 100);

  CHECK_THROWS_AS(word_trace_invariants(x, 7), Error);
}

TEST_CASE("align_conjugation finds planted witnesses and rejects strangers") {
  for (const GroupId& g : {kSu2, GroupId(Family::SU, 3), GroupId(Family::SO, 3),
                           GroupId(Family::Sp, 1)}) {
    const CenterTable table = center_table(g);
    for (int trial = 0; trial < 100; ++trial) {
      const NTuple x =
          sample_point(kRp2_1, g, table.elements[0], derive_seed(14, trial));
      const GroupElement g0 = haar_sample(g, derive_seed(15, trial));
      const NTuple y = apply_diagonal_action(g0, x);
      const AlignmentResult r = align_conjugation(x, y, derive_seed(16, trial));
      REQUIRE(r.found);
      CHECK(r.residual < 1e-8);
      // The witness must actually align; it may differ from g0 by the center.
      CHECK(tuple_distance(apply_diagonal_action(r.witness[0], x), y) < 1e-6);
    }
  }

  const NTuple x = sample_rp2(17);
  const AlignmentResult self = align_conjugation(x, x, 18);
  CHECK(self.found);
  CHECK(self.residual < 1e-8);

  int rejected = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const NTuple u = sample_rp2(derive_seed(19, trial));
    const NTuple v = sample_rp2(derive_seed(20, trial));
    const AlignmentResult r = align_conjugation(u, v, derive_seed(21, trial));
    if (!r.found && r.starts_used == 0) ++rejected;  // trace certificate
  }
  CHECK(rejected == 100);
}

TEST_CASE("align_two_basepoint finds planted witnesses") {
  for (int trial = 0; trial < 25; ++trial) {
    const DoubledTuple x = diagonal_embed(sample_rp2(derive_seed(22, trial), trial % 2));
    const GaugePair k0 = haar_gauge_pair(kSu2, derive_seed(23, trial));
    const DoubledTuple y = apply_action(k0, x);
    const AlignmentResult r = align_two_basepoint(x, y, derive_seed(24, trial));
    REQUIRE(r.found);
    CHECK(r.residual < 1e-8);
    const GaugePair k{r.witness[0], r.witness[1]};
    CHECK(tuple_distance(apply_action(k, x), y) < 1e-6);
  }
  // Diagonal embeds with twist e equal their own block swap, so the swapped
  // tuple must align trivially.
  const DoubledTuple x = diagonal_embed(sample_rp2(25));
  DoubledTuple swapped = x;
  std::swap(swapped.plus_entries, swapped.minus_entries);
  const AlignmentResult r = align_two_basepoint(x, swapped, 26);
  CHECK(r.found);
}

TEST_CASE("stabilizer dimensions") {
  const CenterTable table = center_table(kSu2);
  std::vector<GroupElement> ids(3, identity_element(kSu2));
  NTuple all_id{kRp2_1, kSu2, ids, table.elements[0]};
  CHECK(stabilizer_dimension(all_id) == 3);

  // Independent route: the 6x3 real matrix of (Ad_a - 1, Ad_b - 1) on su(2)
  // has full column rank for this irreducible pair.
  const GroupElement a{kSu2, diag_i()};
  const GroupElement b{kSu2, rot90()};
  const std::vector<Matrix>& basis = algebra_basis(kSu2);
  Eigen::MatrixXd ad(6, 3);
  for (int k = 0; k < 3; ++k) {
    const Matrix da = a.mat * basis[k] * a.mat.adjoint();
    const Matrix db = b.mat * basis[k] * b.mat.adjoint();
    for (int j = 0; j < 3; ++j) {
      ad(j, k) = (basis[j].adjoint() * da).trace().real() - (j == k ? 1.0 : 0.0);
      ad(3 + j, k) = (basis[j].adjoint() * db).trace().real() - (j == k ? 1.0 : 0.0);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ad);
  CHECK(lu.rank() == 3);
  std::vector<GroupElement> pair = {a, b};
  CHECK(stabilizer_dimension(std::span<const GroupElement>(pair)) == 0);

  std::vector<GroupElement> single = {a};
  CHECK(stabilizer_dimension(std::span<const GroupElement>(single)) == 1);
}

TEST_CASE("is_generic on sampled and degenerate tuples") {
  const CenterTable table = center_table(kSu2);
  std::vector<GroupElement> ids(3, identity_element(kSu2));
  CHECK_FALSE(is_generic(NTuple{kRp2_1, kSu2, ids, table.elements[0]}));

  int generic = 0;
  for (int trial = 0; trial < 200; ++trial) {
    if (is_generic(sample_rp2(derive_seed(27, trial)))) ++generic;
  }
  CHECK(generic >= 198);
}

TEST_CASE("stabilizer dimension is conjugation invariant") {
  for (int trial = 0; trial < 50; ++trial) {
    const NTuple x = sample_rp2(derive_seed(28, trial));
    const GroupElement g = haar_sample(kSu2, derive_seed(29, trial));
    CHECK(stabilizer_dimension(x) == stabilizer_dimension(apply_diagonal_action(g, x)));
  }
}
