#include "holovar/serialize.hpp"

#include "holovar/errors.hpp"

namespace holovar {

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
  }
  return out;
}

Matrix matrix_from_json(const Json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols) {
    throw SchemaMismatchError("matrix: expected " + std::to_string(rows * cols) +
                              " [re, im] pairs");
  }
  Matrix m(rows, cols);
  int idx = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c, ++idx) {
      m(r, c) = Complex(j[idx].at(0).get<double>(), j[idx].at(1).get<double>());
    }
  }
  return m;
}

Json to_json(const GroupId& g) {
  return Json{{"family", family_name(g.family)}, {"n", g.n}};
}

GroupId group_id_from_json(const Json& j) {
  return GroupId(parse_family(j.at("family").get<std::string>()), j.at("n").get<int>());
}

Json to_json(const GroupElement& e) {
  return Json{{"group", to_json(e.group)}, {"matrix", matrix_to_json(e.mat)}};
}

GroupElement element_from_json(const Json& j, double eps) {
  const GroupId g = group_id_from_json(j.at("group"));
  return GroupElement::checked(g, matrix_from_json(j.at("matrix"), g.matrix_dim(),
                                                   g.matrix_dim()),
                               eps);
}

Json to_json(const SurfacePresentation& s) {
  return Json{{"kind", surface_kind_name(s.kind)}, {"ell", s.ell}};
}

SurfacePresentation surface_from_json(const Json& j) {
  return SurfacePresentation(parse_surface_kind(j.at("kind").get<std::string>()),
                             j.at("ell").get<int>());
}

Json to_json(const NTuple& x) {
  Json entries = Json::array();
  for (const GroupElement& e : x.entries) entries.push_back(to_json(e));
  const int twist_index = center_table(x.group).nearest(x.twist.mat);
  return Json{{"surface", to_json(x.surface)},
              {"twist_index", twist_index},
              {"entries", std::move(entries)}};
}

NTuple ntuple_from_json(const Json& j, double eps) {
  const SurfacePresentation surface = surface_from_json(j.at("surface"));
  std::vector<GroupElement> entries;
  for (const Json& e : j.at("entries")) entries.push_back(element_from_json(e, eps));
  if (entries.empty()) throw SchemaMismatchError("tuple: no entries");
  const GroupId group = entries.front().group;
  const CenterTable table = center_table(group);
  const int twist_index = j.at("twist_index").get<int>();
  if (twist_index < 0 || twist_index >= table.size()) {
    throw SchemaMismatchError("tuple: twist_index out of range");
  }
  return NTuple{surface, group, std::move(entries), table.elements[twist_index]};
}

Json to_json(const DoubledTuple& x) {
  Json plus = Json::array(), minus = Json::array();
  for (const GroupElement& e : x.plus_entries) plus.push_back(to_json(e));
  for (const GroupElement& e : x.minus_entries) minus.push_back(to_json(e));
  return Json{{"surface", to_json(x.surface)},
              {"plus_entries", std::move(plus)},
              {"minus_entries", std::move(minus)}};
}

DoubledTuple doubled_from_json(const Json& j, double eps) {
  const SurfacePresentation surface = surface_from_json(j.at("surface"));
  std::vector<GroupElement> plus, minus;
  for (const Json& e : j.at("plus_entries")) plus.push_back(element_from_json(e, eps));
  for (const Json& e : j.at("minus_entries")) minus.push_back(element_from_json(e, eps));
  if (plus.empty() || plus.size() != minus.size()) {
    throw SchemaMismatchError("doubled tuple: malformed blocks");
  }
  const GroupId group = plus.front().group;
  return DoubledTuple{surface, group, std::move(plus), std::move(minus)};
}

Json to_json(const AlignmentResult& r) {
  Json witness = Json::array();
  for (const GroupElement& w : r.witness) witness.push_back(to_json(w));
  return Json{{"found", r.found},
              {"witness", std::move(witness)},
              {"residual", r.residual},
              {"starts_used", r.starts_used}};
}

Json to_json(const FixedClassWitness& w) {
  return Json{{"g1", to_json(w.k.g1)},
              {"g2", to_json(w.k.g2)},
              {"twist_index", w.twist_index},
              {"residual", w.residual}};
}

Json to_json(const CenterQuotientClass& c) {
  return Json{{"group", to_json(c.group)},
              {"class_index", c.class_index},
              {"num_classes", c.num_classes},
              {"representative", c.representative}};
}

Json to_json(const FiberReport& r) {
  Json classes = Json::array();
  for (const NTuple& t : r.classes) classes.push_back(to_json(t));
  return Json{{"degree_observed", r.degree},
              {"countable", r.countable},
              {"candidate_sqrt", r.candidate_sqrt},
              {"dedup_evidence", r.dedup_evidence},
              {"max_embed_defect", r.max_embed_defect},
              {"align_starts_total", r.align_starts_total},
              {"candidates", std::move(classes)}};
}

Json to_json(const ExactFiberReport& r) {
  Json hist = Json::object();
  for (const auto& [deg, count] : r.fiber_histogram) {
    hist[std::to_string(deg)] = count;
  }
  Json per_class = Json::array();
  for (const auto& pc : r.per_class) {
    per_class.push_back(Json{{"class_index", pc.class_index},
                             {"twist_members", pc.twist_members},
                             {"solutions", pc.solutions_per_twist},
                             {"orbits", pc.all_orbit_ids.size()},
                             {"generic_orbits", pc.fixed_generic_orbits.size()},
                             {"members_agree", pc.members_agree},
                             {"fiber_histogram",
                              pc.class_index == 0 ? hist : Json::object()}});
  }
  return Json{{"group", r.group},
              {"surface", to_json(r.surface)},
              {"doubled_solutions", r.doubled_solutions},
              {"orbit_count", r.orbit_count},
              {"fixed_orbit_count", r.fixed_orbit_count},
              {"generic_fixed_orbit_count", r.generic_fixed_orbit_count},
              {"predicted_degree", r.predicted_degree},
              {"per_class", std::move(per_class)},
              {"fiber_histogram", std::move(hist)},
              {"partition_disjoint", r.partition_disjoint},
              {"covered", r.covered},
              {"degrees_match_prediction", r.degrees_match_prediction},
              {"defect_orbit_count", r.defect_orbits.size()}};
}

Json to_json(const Tolerances& t) {
  return Json{{"eps_group", t.eps_group},     {"eps_rel", t.eps_rel},
              {"eps_align", t.eps_align},     {"eps_center", t.eps_center},
              {"delta_branch", t.delta_branch}, {"sigma_tol", t.sigma_tol}};
}

Tolerances tolerances_from_json(const Json& j) {
  Tolerances t;
  t.eps_group = j.value("eps_group", t.eps_group);
  t.eps_rel = j.value("eps_rel", t.eps_rel);
  t.eps_align = j.value("eps_align", t.eps_align);
  t.eps_center = j.value("eps_center", t.eps_center);
  t.delta_branch = j.value("delta_branch", t.delta_branch);
  t.sigma_tol = j.value("sigma_tol", t.sigma_tol);
  return t;
}

}  // namespace holovar
