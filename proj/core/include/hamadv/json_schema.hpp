#pragma once
// Minimal structural JSON-Schema checker covering the subset the shipped
// report schema uses: type, properties, required, additionalProperties
// (boolean), items, enum, const, oneOf.

#include <string>
#include <vector>

#include <json.hpp>

namespace hamadv {

/// Returns a list of human-readable violations; empty means the document
/// validates.
std::vector<std::string> schema_validate(const nlohmann::json& doc, const nlohmann::json& schema);

} // namespace hamadv
