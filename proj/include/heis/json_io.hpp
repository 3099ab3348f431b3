#pragma once

#include <json.hpp>
#include <string>

#include "heis/cone_classifier.hpp"
#include "heis/measure_models.hpp"
#include "heis/perimeter_expansion.hpp"
#include "heis/quadric.hpp"

namespace heis {

using json = nlohmann::json;

json to_json(const Quadric& q);
Quadric quadric_from_json(const json& j);

json to_json(const MeasureModel& m);
MeasureModel model_from_json(const json& j);

json to_json(const IntegralResult& r);
json to_json(const ExpansionReport& rep);
json to_json(const ResidualField& field);  // one scan-database record

MeasureModel load_model(const std::string& path);

}  // namespace heis
