#pragma once

#include "momentcone/measures.hpp"
#include "momentcone/models.hpp"

#include <json.hpp>

namespace momentcone {

using json = nlohmann::json;

json point_to_json(const Point& x);
Point point_from_json(const json& j);

// {"lower":[...],"upper":[...]}
json window_to_json(const Window& w);
Window window_from_json(const json& j);

// {"atoms":[{"x":[...],"s":...},...]}
json measure_to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const json& j);

// {"boxes":[window,...],"exclusion_radius":r}
json box_to_json(const OffDiagonalBox& b);
OffDiagonalBox box_from_json(const json& j);

// {"variant":"gamma","rate":1.0} and friends; see docs/model.schema.json.
// Inhomogeneous and custom densities have no JSON form.
json model_to_json(const MeasureModel& m);
MeasureModel model_from_json(const json& j);

}  // namespace momentcone
