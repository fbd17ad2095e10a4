#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "osmoflow/field.hpp"
#include "osmoflow/params.hpp"

namespace osmoflow {

// JSON encoding for states and parameters.  Doubles are written in the
// shortest form that round-trips exactly, so save -> load is bit-faithful.

nlohmann::json to_json(const RadialGrid& g);
RadialGrid grid_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RadialState& s);
RadialState state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PhysParams& p);
PhysParams params_from_json(const nlohmann::json& j);

void save_state(const RadialState& s, const std::string& path);
RadialState load_state(const std::string& path);

}  // namespace osmoflow
