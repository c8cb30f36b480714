#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "holovar/gauge.hpp"
#include "holovar/rng.hpp"
#include "holovar/variety.hpp"

using namespace holovar;

namespace {

const GroupId kSu2(Family::SU, 2);
const SurfacePresentation kRp2_1(SurfaceKind::RP2Sum, 1);
const SurfacePresentation kKlein1(SurfaceKind::KleinSum, 1);

NTuple identity_tuple(const SurfacePresentation& s, const GroupId& g,
                      const GroupElement& twist) {
  std::vector<GroupElement> entries(s.entry_count(), identity_element(g));
  return NTuple{s, g, std::move(entries), twist};
}

}  // namespace

TEST_CASE("surface presentations and double covers") {
  CHECK(kRp2_1.entry_count() == 3);
  CHECK(kKlein1.entry_count() == 4);
  CHECK(SurfacePresentation(SurfaceKind::Orientable, 2).entry_count() == 4);
  CHECK_THROWS_AS(SurfacePresentation(SurfaceKind::Orientable, 0), Error);

  const SurfacePresentation c1 = double_cover(SurfacePresentation(SurfaceKind::RP2Sum, 3));
  CHECK(c1.kind == SurfaceKind::Orientable);
  CHECK(c1.ell == 6);
  const SurfacePresentation c2 = double_cover(SurfacePresentation(SurfaceKind::KleinSum, 1));
  CHECK(c2.ell == 3);
  CHECK_THROWS_AS(double_cover(SurfacePresentation(SurfaceKind::Orientable, 2)),
                  AlreadyOrientableError);
}

TEST_CASE("relation residual matches hand-computed values") {
  const CenterTable table = center_table(kSu2);
  CHECK(relation_residual(identity_tuple(kRp2_1, kSu2, table.elements[0])) == 0.0);
  // All-identity tuple with twist -I: LHS * RHS^{-1} - I = -2I on 2x2.
  CHECK(relation_residual(identity_tuple(kRp2_1, kSu2, table.elements[1])) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  // The Klein relation ignores the twist: it only twists the embedding.
  CHECK(relation_residual(identity_tuple(kKlein1, kSu2, table.elements[1])) == 0.0);
}

TEST_CASE("sampled points land on the variety across the supported matrix") {
  const std::vector<GroupId> groups = {kSu2, GroupId(Family::SU, 3), GroupId(Family::SO, 3),
                                       GroupId(Family::Sp, 1)};
  for (const GroupId& g : groups) {
    const CenterTable table = center_table(g);
    for (int twist = 0; twist < table.size(); ++twist) {
      for (int ell = 0; ell <= 2; ++ell) {
        for (const SurfaceKind kind : {SurfaceKind::RP2Sum, SurfaceKind::KleinSum}) {
          // The square-root sampler cannot produce RP^2 (ell = 0) points with
          // a branch-cut central target; that combination exhausts by design.
          const bool exhausts = kind == SurfaceKind::RP2Sum && ell == 0 && twist != 0 &&
                                std::abs(table.elements[twist].mat(0, 0) + 1.0) < 1e-9;
          const SurfacePresentation surface(kind, ell);
          const int seeds = 50;
          for (int seed = 0; seed < seeds; ++seed) {
            if (exhausts) {
              CHECK_THROWS_AS(
                  sample_point(surface, g, table.elements[twist], seed),
                  SamplingExhaustedError);
              break;
            }
            const NTuple x =
                sample_point(surface, g, table.elements[twist], derive_seed(77, seed));
            REQUIRE(relation_residual(x) < Tolerances{}.eps_rel);
            for (const GroupElement& e : x.entries) {
              REQUIRE(group_residual(e.mat, g) < 1e-9);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("rp2 sampler degenerate cases") {
  const CenterTable table = center_table(kSu2);
  // Empty product with twist e: c must be the principal root of I.
  const NTuple x = sample_point(SurfacePresentation(SurfaceKind::RP2Sum, 0), kSu2,
                                table.elements[0], 5);
  CHECK(frobenius_distance(x.entries[0].mat, Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("sample_point input validation") {
  const CenterTable table = center_table(kSu2);
  CHECK_THROWS_AS(sample_point(SurfacePresentation(SurfaceKind::Orientable, 1), kSu2,
                               table.elements[0], 1),
                  Error);
  CHECK_THROWS_AS(sample_point(kRp2_1, kSu2, haar_sample(kSu2, 3), 1), Error);
}

TEST_CASE("diagonal embedding lands on the doubled variety") {
  const CenterTable table = center_table(kSu2);
  const NTuple x = sample_point(kRp2_1, kSu2, table.elements[0], 21);
  const DoubledTuple dx = diagonal_embed(x);
  CHECK(relation_residual(dx) < 1e-10);
  CHECK(tuple_distance(dx, DoubledTuple{dx.surface, dx.group, x.entries, x.entries}) ==
        0.0);

  const NTuple xm = sample_point(kRp2_1, kSu2, table.elements[1], 22);
  const DoubledTuple dxm = diagonal_embed(xm);
  CHECK(relation_residual(dxm) < 1e-10);
  // Minus arc is c r.
  CHECK(frobenius_distance(dxm.minus_entries.back().mat,
                           xm.entries.back().mat * table.elements[1].mat) == 0.0);

  NTuple off = x;
  off.entries.back().mat *= std::polar(1.0, 0.2);  // c^2 picks up a phase
  CHECK_THROWS_AS(diagonal_embed(off), OffVarietyError);
}

TEST_CASE("solve_commutator examples") {
  // w = I accepted from the identity start without iterating.
  const auto [a0, b0] = solve_commutator(identity_element(kSu2), 31);
  CHECK(frobenius_distance(a0.mat, Matrix::Identity(2, 2)) < 1e-14);
  CHECK(frobenius_distance(b0.mat, Matrix::Identity(2, 2)) < 1e-14);

  const GroupElement minus{kSu2, -Matrix::Identity(2, 2)};
  const auto [a1, b1] = solve_commutator(minus, 32);
  CHECK(frobenius_distance(commutator(a1, b1).mat, minus.mat) < 1e-10);

  const GroupId su3(Family::SU, 3);
  for (int seed = 0; seed < 5; ++seed) {
    const GroupElement w = haar_sample(su3, 3300 + seed);
    const auto [a, b] = solve_commutator(w, seed);
    CHECK(frobenius_distance(commutator(a, b).mat, w.mat) < 1e-8);
  }
}

TEST_CASE("refine polishes and validates its precondition") {
  const CenterTable table = center_table(kSu2);
  const NTuple x = sample_point(kRp2_1, kSu2, table.elements[0], 41);
  NTuple noisy = x;
  noisy.entries[1].mat += 3e-3 * haar_sample(kSu2, 42).mat;
  noisy.entries[1] = project_to_group(noisy.entries[1].mat, kSu2);
  REQUIRE(relation_residual(noisy) > 1e-6);
  const NTuple polished = refine(noisy, 1e-12);
  CHECK(relation_residual(polished) < 1e-12);

  const NTuple exact = identity_tuple(kRp2_1, kSu2, table.elements[0]);
  const NTuple still = refine(exact, 1e-12);
  CHECK(tuple_distance(exact, still) < 1e-12);

  NTuple bad = identity_tuple(kRp2_1, kSu2, table.elements[0]);
  bad.entries[2].mat = haar_sample(kSu2, 43).mat;  // residual around 0.5
  if (relation_residual(bad) >= 0.1) {
    CHECK_THROWS_AS(refine(bad, 1e-10), std::invalid_argument);
  }

  // Doubled refine.
  DoubledTuple dd = diagonal_embed(x);
  dd.plus_entries[0].mat += 1e-3 * haar_sample(kSu2, 44).mat;
  dd.plus_entries[0] = project_to_group(dd.plus_entries[0].mat, kSu2);
  const DoubledTuple dpolished = refine(dd, 1e-11);
  CHECK(relation_residual(dpolished) < 1e-11);
}

TEST_CASE("variety residual is gauge invariant") {
  const CenterTable table = center_table(kSu2);
  for (int trial = 0; trial < 100; ++trial) {
    const int twist = trial % 2;
    const NTuple x =
        sample_point(trial % 4 < 2 ? kRp2_1 : kKlein1, kSu2, table.elements[twist],
                     derive_seed(51, trial));
    const DoubledTuple dx = diagonal_embed(x);
    const GaugePair k = haar_gauge_pair(kSu2, derive_seed(52, trial));
    CHECK(relation_residual(apply_action(k, dx)) < 10 * Tolerances{}.eps_rel);
  }
}

TEST_CASE("product order matters for ell = 2 relations") {
  const CenterTable table = center_table(kSu2);
  const SurfacePresentation rp2_2(SurfaceKind::RP2Sum, 2);
  const NTuple x = sample_point(rp2_2, kSu2, table.elements[0], 61);
  REQUIRE(relation_residual(x) < 1e-10);
  // Swapping the two commutator pairs must generically break the relation.
  NTuple permuted = x;
  std::swap(permuted.entries[0], permuted.entries[2]);
  std::swap(permuted.entries[1], permuted.entries[3]);
  CHECK(relation_residual(permuted) > 1e-3);
}

TEST_CASE("orientable tuples accept central relation targets") {
  // Genus-1 tuple with [a, b] equal to a central target, the holonomy model
  // of fixed-degree bundle moduli.
  const CenterTable table = center_table(kSu2);
  const auto [a, b] = solve_commutator(table.elements[1], 71);
  const NTuple x{SurfacePresentation(SurfaceKind::Orientable, 1), kSu2, {a, b},
                 table.elements[1]};
  CHECK(relation_residual(x) < 1e-8);
  NTuple wrong = x;
  wrong.twist = table.elements[0];
  CHECK(relation_residual(wrong) > 1.0);
}

TEST_CASE("sampling exhaustion reports honestly") {
  // RP^2 with ell = 0 and twist -I asks for sqrt(-I): every attempt hits the
  // branch cut and the sampler must say so rather than perturb.
  const CenterTable table = center_table(kSu2);
  CHECK_THROWS_AS(sample_point(SurfacePresentation(SurfaceKind::RP2Sum, 0), kSu2,
                               table.elements[1], 7),
                  SamplingExhaustedError);
}
