#include "rahl/schema.hpp"

#include <cmath>

#include "rahl/errors.hpp"

namespace rahl {

namespace {

using nlohmann::json;

bool type_matches(const std::string& type, const json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    if (type == "number") return v.is_number();
    if (type == "integer") {
        return v.is_number_integer() ||
               (v.is_number_float() && std::trunc(v.get<double>()) == v.get<double>());
    }
    return false;
}

void check(const json& schema, const json& doc, const std::string& path,
           std::vector<SchemaViolation>& out) {
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(t.get<std::string>(), doc);
        } else {
            for (const json& alt : t) ok = ok || type_matches(alt.get<std::string>(), doc);
        }
        if (!ok) {
            out.push_back({path, "expected type " + t.dump() + ", got " +
                                     std::string(doc.type_name())});
            return;
        }
    }

    if (schema.contains("enum")) {
        bool ok = false;
        for (const json& alt : schema["enum"]) ok = ok || alt == doc;
        if (!ok) out.push_back({path, "value " + doc.dump() + " not in enum"});
    }

    if (doc.is_number()) {
        const double v = doc.get<double>();
        if (schema.contains("minimum") && v < schema["minimum"].get<double>()) {
            out.push_back({path, "value below minimum " + schema["minimum"].dump()});
        }
        if (schema.contains("exclusiveMinimum") &&
            v <= schema["exclusiveMinimum"].get<double>()) {
            out.push_back({path, "value not above " + schema["exclusiveMinimum"].dump()});
        }
    }

    if (doc.is_object()) {
        if (schema.contains("required")) {
            for (const json& key : schema["required"]) {
                if (!doc.contains(key.get<std::string>())) {
                    out.push_back({path, "missing required property '" +
                                             key.get<std::string>() + "'"});
                }
            }
        }
        const json props = schema.value("properties", json::object());
        for (const auto& [key, value] : doc.items()) {
            if (props.contains(key)) {
                check(props[key], value, path + "/" + key, out);
            } else if (schema.contains("additionalProperties") &&
                       schema["additionalProperties"].is_boolean() &&
                       !schema["additionalProperties"].get<bool>()) {
                out.push_back({path, "unexpected property '" + key + "'"});
            }
        }
    }

    if (doc.is_array()) {
        if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>()) {
            out.push_back({path, "array shorter than minItems " + schema["minItems"].dump()});
        }
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < doc.size(); ++i) {
                check(schema["items"], doc[i], path + "/" + std::to_string(i), out);
            }
        }
    }
}

}  // namespace

std::vector<SchemaViolation> schema_validate(const json& schema, const json& doc) {
    std::vector<SchemaViolation> out;
    check(schema, doc, "", out);
    return out;
}

void schema_require(const json& schema, const json& doc, const std::string& what) {
    const auto violations = schema_validate(schema, doc);
    if (violations.empty()) return;
    std::string msg = what + " fails schema validation:";
    for (const SchemaViolation& v : violations) {
        msg += "\n  " + (v.path.empty() ? "/" : v.path) + ": " + v.message;
    }
    throw InvalidArgument(msg);
}

}  // namespace rahl
