#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rahl {

struct SchemaViolation {
    std::string path;     // JSON pointer-ish location in the document
    std::string message;
};

/// Validates a document against the subset of JSON Schema used by the
/// schemas shipped in schemas/: type (string or list), properties, required,
/// additionalProperties (boolean), items, enum, minimum, exclusiveMinimum,
/// minItems. Returns every violation found.
std::vector<SchemaViolation> schema_validate(const nlohmann::json& schema,
                                             const nlohmann::json& doc);

/// Convenience wrapper: throws InvalidArgument listing the violations.
void schema_require(const nlohmann::json& schema, const nlohmann::json& doc,
                    const std::string& what);

}  // namespace rahl
