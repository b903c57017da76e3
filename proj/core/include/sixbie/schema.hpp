#pragma once

// Validation against the subset of JSON Schema used by the published
// schemas: type, enum, properties, required, additionalProperties (boolean),
// items, minItems, maxItems, minimum, maximum, exclusiveMinimum,
// exclusiveMaximum, default and local "$ref": "#/$defs/<name>".

#include <string>
#include <vector>

#include "json.hpp"

namespace sixbie::schema {

/// Violations as "<json pointer>: <reason>"; empty when the document conforms.
std::vector<std::string> validate(const nlohmann::json& doc, const nlohmann::json& schema);

/// Inserts "default" values for absent object members, recursively.
void apply_defaults(nlohmann::json& doc, const nlohmann::json& schema);

const nlohmann::json& config_schema();
const nlohmann::json& diagnostics_schema();

}  // namespace sixbie::schema
