#pragma once

// Validation of JSON instances against the subset of JSON Schema used by
// schemas/*.schema.json: type (string or list), properties, required,
// additionalProperties (bool or schema), enum, minimum, maximum,
// exclusiveMinimum, exclusiveMaximum, items, minItems, maxItems, minLength.
// Unknown keywords are ignored.

#include <string>
#include <vector>

#include <json.hpp>

namespace derham {

/// One message per violation, prefixed with the JSON pointer of the value.
std::vector<std::string> schema_violations(const nlohmann::json& schema, const nlohmann::json& instance);

/// The run-configuration schema compiled into the library.
const nlohmann::json& run_config_schema();

}  // namespace derham
