#include "hamadv/json_schema.hpp"

namespace hamadv {

namespace {

using nlohmann::json;

bool type_matches(const json& doc, const std::string& type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "number") return doc.is_number();
    if (type == "integer") return doc.is_number_integer();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    return false;
}

void check(const json& doc, const json& schema, const std::string& path,
           std::vector<std::string>& errors) {
    if (schema.contains("oneOf")) {
        const json& branches = schema.at("oneOf");
        int matches = 0;
        for (const json& branch : branches) {
            std::vector<std::string> branch_errors;
            check(doc, branch, path, branch_errors);
            if (branch_errors.empty()) ++matches;
        }
        if (matches != 1)
            errors.push_back(path + ": matched " + std::to_string(matches) +
                             " oneOf branches, expected exactly 1");
        return;
    }

    if (schema.contains("const")) {
        if (doc != schema.at("const"))
            errors.push_back(path + ": value does not equal const " + schema.at("const").dump());
        return;
    }

    if (schema.contains("enum")) {
        bool found = false;
        for (const json& v : schema.at("enum"))
            if (doc == v) found = true;
        if (!found) errors.push_back(path + ": value " + doc.dump() + " not in enum");
        return;
    }

    if (schema.contains("type")) {
        const json& t = schema.at("type");
        bool ok = false;
        if (t.is_string())
            ok = type_matches(doc, t.get<std::string>());
        else if (t.is_array())
            for (const json& alt : t)
                if (type_matches(doc, alt.get<std::string>())) ok = true;
        if (!ok) {
            errors.push_back(path + ": type mismatch, expected " + t.dump());
            return;
        }
    }

    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const json& k : schema.at("required"))
                if (!doc.contains(k.get<std::string>()))
                    errors.push_back(path + ": missing required key \"" + k.get<std::string>() + "\"");
        const json* props = schema.contains("properties") ? &schema.at("properties") : nullptr;
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            const std::string child_path = path + "/" + it.key();
            if (props && props->contains(it.key())) {
                check(it.value(), props->at(it.key()), child_path, errors);
            } else if (schema.contains("additionalProperties") &&
                       schema.at("additionalProperties").is_boolean() &&
                       !schema.at("additionalProperties").get<bool>()) {
                errors.push_back(child_path + ": additional property not allowed");
            }
        }
    }

    if (doc.is_array() && schema.contains("items")) {
        const json& items = schema.at("items");
        for (std::size_t i = 0; i < doc.size(); ++i)
            check(doc[i], items, path + "[" + std::to_string(i) + "]", errors);
    }
}

} // namespace

std::vector<std::string> schema_validate(const nlohmann::json& doc, const nlohmann::json& schema) {
    std::vector<std::string> errors;
    check(doc, schema, "", errors);
    return errors;
}

} // namespace hamadv
