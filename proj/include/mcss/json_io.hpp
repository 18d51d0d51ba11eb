#pragma once

#include <string>

#include <json.hpp>

#include "mcss/ensemble.hpp"
#include "mcss/kalman.hpp"

namespace mcss {

nlohmann::json pool_to_json(const SensorPool& pool);
SensorPool pool_from_json(const nlohmann::json& j);

nlohmann::json system_to_json(const LtiSystem& sys);
LtiSystem system_from_json(const nlohmann::json& j);

void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

}  // namespace mcss
