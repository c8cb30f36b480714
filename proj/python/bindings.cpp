#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "holovar/experiment.hpp"
#include "holovar/involution.hpp"
#include "holovar/oracle.hpp"
#include "holovar/serialize.hpp"

namespace py = pybind11;
using namespace holovar;

namespace {

GroupId make_group(const std::string& family, int n) {
  return GroupId(parse_family(family), n);
}

SurfacePresentation make_surface(const std::string& kind, int ell) {
  return SurfacePresentation(parse_surface_kind(kind), ell);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "moduli of flat connections on nonorientable surfaces and their double covers";
  m.attr("__version__") = kVersion;

  py::register_exception<BranchCutError>(m, "BranchCutError");
  py::register_exception<SamplingExhaustedError>(m, "SamplingExhaustedError");
  py::register_exception<NoConvergenceError>(m, "NoConvergenceError");
  py::register_exception<OffVarietyError>(m, "OffVarietyError");
  py::register_exception<NonCentralTwistError>(m, "NonCentralTwistError");
  py::register_exception<Error>(m, "HolovarError");

  py::class_<GroupId>(m, "GroupId")
      .def(py::init(&make_group), py::arg("family"), py::arg("n"))
      .def_readonly("n", &GroupId::n)
      .def_property_readonly("family",
                             [](const GroupId& g) { return family_name(g.family); })
      .def_property_readonly("matrix_dim", &GroupId::matrix_dim)
      .def_property_readonly("algebra_dim", &GroupId::algebra_dim)
      .def("__repr__", [](const GroupId& g) { return g.label(); });

  py::class_<GroupElement>(m, "GroupElement")
      .def(py::init([](const GroupId& g, const Matrix& m_) {
             return GroupElement::checked(g, m_);
           }),
           py::arg("group"), py::arg("matrix"))
      .def_readonly("group", &GroupElement::group)
      .def_property_readonly("matrix", [](const GroupElement& e) { return e.mat; })
      .def("inverse", &GroupElement::inverse);

  py::class_<AlgebraElement>(m, "AlgebraElement")
      .def_readonly("group", &AlgebraElement::group)
      .def_property_readonly("matrix", [](const AlgebraElement& e) { return e.mat; });

  py::class_<CenterTable>(m, "CenterTable")
      .def_readonly("elements", &CenterTable::elements)
      .def_readonly("two_center", &CenterTable::two_center)
      .def_readonly("quotient_classes", &CenterTable::quotient_classes)
      .def_readonly("sqrt_of_identity", &CenterTable::sqrt_of_identity)
      .def_property_readonly("order", &CenterTable::size)
      .def("nearest", [](const CenterTable& t, const Matrix& m_) {
        double dist = 0.0;
        const int idx = t.nearest(m_, &dist);
        return py::make_tuple(idx, dist);
      });

  py::class_<SurfacePresentation>(m, "Surface")
      .def(py::init(&make_surface), py::arg("kind"), py::arg("ell"))
      .def_readonly("ell", &SurfacePresentation::ell)
      .def_property_readonly("kind",
                             [](const SurfacePresentation& s) {
                               return surface_kind_name(s.kind);
                             })
      .def_property_readonly("entry_count", &SurfacePresentation::entry_count)
      .def("__repr__", [](const SurfacePresentation& s) { return s.label(); });

  py::class_<NTuple>(m, "NTuple")
      .def_readonly("surface", &NTuple::surface)
      .def_readonly("group", &NTuple::group)
      .def_readonly("entries", &NTuple::entries)
      .def_readonly("twist", &NTuple::twist);

  py::class_<DoubledTuple>(m, "DoubledTuple")
      .def_readonly("surface", &DoubledTuple::surface)
      .def_readonly("plus_entries", &DoubledTuple::plus_entries)
      .def_readonly("minus_entries", &DoubledTuple::minus_entries);

  py::class_<GaugePair>(m, "GaugePair")
      .def(py::init<GroupElement, GroupElement>(), py::arg("g1"), py::arg("g2"))
      .def_readonly("g1", &GaugePair::g1)
      .def_readonly("g2", &GaugePair::g2);

  py::class_<AlignmentResult>(m, "AlignmentResult")
      .def_readonly("found", &AlignmentResult::found)
      .def_readonly("witness", &AlignmentResult::witness)
      .def_readonly("residual", &AlignmentResult::residual)
      .def_readonly("starts_used", &AlignmentResult::starts_used);

  py::class_<FixedClassWitness>(m, "FixedClassWitness")
      .def_readonly("k", &FixedClassWitness::k)
      .def_readonly("twist", &FixedClassWitness::twist)
      .def_readonly("twist_index", &FixedClassWitness::twist_index)
      .def_readonly("residual", &FixedClassWitness::residual);

  py::class_<FiberReport>(m, "FiberReport")
      .def_readonly("degree", &FiberReport::degree)
      .def_readonly("countable", &FiberReport::countable)
      .def_readonly("classes", &FiberReport::classes)
      .def_readonly("dedup_evidence", &FiberReport::dedup_evidence);

  // groups
  m.def("haar_sample", &haar_sample, py::arg("group"), py::arg("seed"));
  m.def("project_to_group", &project_to_group, py::arg("matrix"), py::arg("group"));
  m.def("commutator", &commutator);
  m.def("group_log", &group_log, py::arg("x"), py::arg("delta_branch") = Tolerances{}.delta_branch);
  m.def("group_exp", &group_exp);
  m.def("principal_square_root", &principal_square_root, py::arg("w"),
        py::arg("delta_branch") = Tolerances{}.delta_branch);
  m.def("center_table", &center_table);
  m.def("group_residual", &group_residual);
  m.def("identity_element", &identity_element);
  m.def("abstract_center_quotient", [](const std::vector<int>& factors) {
    const AbstractCenterSummary s = abstract_center_quotient(factors);
    py::dict out;
    out["order"] = s.order;
    out["two_subgroup_order"] = s.two_subgroup_order;
    out["quotient_order"] = s.quotient_order;
    out["sqrt_identity_count"] = s.sqrt_identity_count;
    return out;
  });

  // variety
  m.def("double_cover", &double_cover);
  m.def("relation_residual", py::overload_cast<const NTuple&>(&relation_residual));
  m.def("relation_residual", py::overload_cast<const DoubledTuple&>(&relation_residual));
  m.def("diagonal_embed",
        [](const NTuple& x) { return diagonal_embed(x); });
  m.def("sample_point",
        [](const SurfacePresentation& s, const GroupId& g, int twist_index,
           std::uint64_t seed) {
          const CenterTable table = center_table(g);
          if (twist_index < 0 || twist_index >= table.size()) {
            throw Error("twist index out of range");
          }
          return sample_point(s, g, table.elements[twist_index], seed);
        },
        py::arg("surface"), py::arg("group"), py::arg("twist_index"), py::arg("seed"));
  m.def("solve_commutator",
        [](const GroupElement& w, std::uint64_t seed) { return solve_commutator(w, seed); },
        py::arg("w"), py::arg("seed"));
  m.def("refine", [](const NTuple& x, double tol) { return refine(x, tol); },
        py::arg("x"), py::arg("tol"));

  // gauge
  m.def("apply_action", &apply_action);
  m.def("apply_diagonal_action", &apply_diagonal_action);
  m.def("haar_gauge_pair", &haar_gauge_pair);
  m.def("word_trace_invariants",
        [](const NTuple& x, int max_len) { return word_trace_invariants(x, max_len); },
        py::arg("x"), py::arg("max_word_length") = 3);
  m.def("align_conjugation",
        [](const NTuple& x, const NTuple& y, std::uint64_t seed) {
          return align_conjugation(x, y, seed);
        },
        py::arg("x"), py::arg("y"), py::arg("seed"));
  m.def("align_two_basepoint",
        [](const DoubledTuple& x, const DoubledTuple& y, std::uint64_t seed) {
          return align_two_basepoint(x, y, seed);
        },
        py::arg("x"), py::arg("y"), py::arg("seed"));
  m.def("stabilizer_dimension",
        [](const NTuple& x) { return stabilizer_dimension(x); });
  m.def("is_generic", [](const NTuple& x) { return is_generic(x); });

  // involution
  m.def("tau_point", &tau_point);
  m.def("tau_gauge", &tau_gauge);
  m.def("find_fixed_witness",
        [](const DoubledTuple& x, std::uint64_t seed) {
          return find_fixed_witness(x, center_table(x.group), seed);
        },
        py::arg("x"), py::arg("seed"));
  m.def("normalize_to_Nr",
        [](const DoubledTuple& x, const FixedClassWitness& w, std::uint64_t seed) {
          return normalize_to_Nr(x, w, seed);
        },
        py::arg("x"), py::arg("witness"), py::arg("seed"));
  m.def("map_I", [](const NTuple& x) { return map_I(x); });
  m.def("fiber_of_I", [](const NTuple& x, std::uint64_t seed) {
    return fiber_of_I(x, center_table(x.group), seed);
  }, py::arg("x"), py::arg("seed"));
  m.def("phi_map", [](const DoubledTuple& x) { return phi_map(x); });
  m.def("verify_lift_commutator_identity",
        [](const NTuple& x) { return verify_lift_commutator_identity(x); });
  m.def("twist_class_index", [](const GroupElement& r) {
    return twist_class(center_table(r.group), r).class_index;
  });
  m.def("lift_obstruction_class", [](const NTuple& x) {
    const CenterTable table = center_table(x.group);
    const Obstruction ob = lift_and_obstruct(project_center(x, table), x.surface, table);
    return ob.quotient_class.class_index;
  });

  // oracle
  m.def("exact_fiber_degree", [](const std::string& group, const SurfacePresentation& s) {
    const ExactFiberReport r = exact_fiber_degree(builtin_group(parse_builtin_group(group)), s);
    return to_json(r).dump();
  });

  // experiments
  m.def("run_experiment", [](const std::string& config_json) {
    const ExperimentConfig config = config_from_json(Json::parse(config_json));
    const RunOutcome outcome = run_experiment(config);
    return py::make_tuple(outcome.report.dump(), outcome.exit_code);
  });
}
