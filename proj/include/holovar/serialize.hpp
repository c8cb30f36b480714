#pragma once

#include <json.hpp>

#include "holovar/gauge.hpp"
#include "holovar/groups.hpp"
#include "holovar/involution.hpp"
#include "holovar/oracle.hpp"
#include "holovar/variety.hpp"

namespace holovar {

// Insertion-ordered JSON keeps report bodies byte-stable for fixed configs.
using Json = nlohmann::ordered_json;

// Matrices travel as row-major lists of [re, im] pairs.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, int rows, int cols);

Json to_json(const GroupId& g);
GroupId group_id_from_json(const Json& j);

Json to_json(const GroupElement& e);
GroupElement element_from_json(const Json& j, double eps = Tolerances{}.eps_group);

Json to_json(const SurfacePresentation& s);
SurfacePresentation surface_from_json(const Json& j);

Json to_json(const NTuple& x);
NTuple ntuple_from_json(const Json& j, double eps = Tolerances{}.eps_group);

Json to_json(const DoubledTuple& x);
DoubledTuple doubled_from_json(const Json& j, double eps = Tolerances{}.eps_group);

Json to_json(const AlignmentResult& r);
Json to_json(const FixedClassWitness& w);
Json to_json(const CenterQuotientClass& c);
Json to_json(const FiberReport& r);
Json to_json(const ExactFiberReport& r);

Json to_json(const Tolerances& t);
Tolerances tolerances_from_json(const Json& j);

}  // namespace holovar
