#pragma once

#include <json.hpp>

#include "isolab/arrows.hpp"
#include "isolab/jmms.hpp"
#include "isolab/types.hpp"

namespace isolab::codec {

using json = nlohmann::json;

// Complex numbers are [re, im]; a bare number is accepted on input.
json to_json(cplx z);
cplx complex_from(const json& j);

// Matrices: {"n": n, "re": [[...]], "im": [[...]]}, row-major.
json to_json(const CMatrix& m);
CMatrix matrix_from(const json& j);

json vector_to_json(const CVector& v);
CVector vector_from(const json& j);

json to_json(const Thetas& th);
Thetas thetas_from(const json& j);

// {"theta": [4 x [re, im]], "sigma": [re, im], "J": [re, im]}
json to_json(const PviData& d);
PviData pvi_data_from(const json& j);

json to_json(const BoundaryValue& b);
BoundaryValue boundary_value_from(const json& j);

json to_json(const StokesPair& s);
StokesPair stokes_from(const json& j);

json to_json(const MonodromyData& m);
MonodromyData monodromy_from(const json& j);

json to_json(const JmmsState& s);
JmmsState jmms_state_from(const json& j);

}  // namespace isolab::codec
