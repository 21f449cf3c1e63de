#pragma once

#include <nlohmann/json.hpp>

#include "incrcert/supply.hpp"
#include "incrcert/types.hpp"

namespace incrcert {

/// Matrix as nested row arrays (human-writable form used in configs).
nlohmann::json matrix_to_nested(const Matrix& m);
Matrix matrix_from_nested(const nlohmann::json& j);

void to_json(nlohmann::json& j, const SupplyQSR& s);
void from_json(const nlohmann::json& j, SupplyQSR& s);

}  // namespace incrcert
