// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// The tool-mapping catalog translating a call's (kind, func_type) into a
// concrete environment/tool/parameter template. Templates may contain
// `{name}` placeholders naming either a declared call argument or a `system`
// variable left for runtime resolution. A func_type may carry several
// variants distinguished by their exact argument-name sets, which is how one
// ScriptExecution covers both `command:'su'` and `target/shell/file` calls.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "alia/ast.hpp"
#include "alia/errors.hpp"

namespace alia {

/// Placeholder names appearing as `{name}` in `text`, in order.
inline std::vector<std::string> placeholders_in(const std::string& text) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{')
            continue;
        std::size_t end = text.find('}', i + 1);
        if (end == std::string::npos)
            break;
        out.push_back(text.substr(i + 1, end - i - 1));
        i = end;
    }
    return out;
}

struct ToolTemplate {
    std::vector<std::string> args; // call-argument names this variant expects
    std::string environment;
    std::string tool;
    std::vector<std::string> parameters;
    std::vector<std::string> system; // placeholders resolved at runtime only

    friend bool operator==(const ToolTemplate&, const ToolTemplate&) = default;
};

class ToolMapping {
public:
    using Entries = std::map<std::string, std::vector<ToolTemplate>>;

    ToolMapping() = default;
    explicit ToolMapping(Entries entries) : entries_(std::move(entries)) { validate(); }

    static std::string key(CallKind kind, const std::string& func_type) {
        return std::string(to_string(kind)) + ":" + func_type;
    }

    bool contains(CallKind kind, const std::string& func_type) const {
        return entries_.count(key(kind, func_type)) != 0;
    }

    /// Selects the variant whose declared argument names equal `arg_names`.
    /// A sole variant also matches inexactly: substitution then reports any
    /// placeholder left without an argument. Returns nullptr when several
    /// variants exist and none matches.
    const ToolTemplate* find(CallKind kind, const std::string& func_type,
                             const std::set<std::string>& arg_names) const {
        auto it = entries_.find(key(kind, func_type));
        if (it == entries_.end())
            return nullptr;
        for (const ToolTemplate& variant : it->second) {
            std::set<std::string> declared(variant.args.begin(), variant.args.end());
            if (declared == arg_names)
                return &variant;
        }
        return it->second.size() == 1 ? &it->second.front() : nullptr;
    }

    const Entries& entries() const { return entries_; }

private:
    /// Every placeholder must name a declared argument or a system variable;
    /// anything else would be unresolvable by construction.
    void validate() const {
        for (const auto& [entry_key, variants] : entries_) {
            if (variants.empty())
                throw Error("malformed-mapping", "entry '" + entry_key + "' has no variants");
            for (const ToolTemplate& variant : variants) {
                std::set<std::string> known(variant.args.begin(), variant.args.end());
                known.insert(variant.system.begin(), variant.system.end());
                auto check = [&](const std::string& text) {
                    for (const std::string& name : placeholders_in(text))
                        if (!known.count(name))
                            throw Error("template-arity",
                                        "entry '" + entry_key + "': placeholder '{" + name +
                                            "}' names neither a declared argument nor a "
                                            "system variable");
                };
                check(variant.environment);
                check(variant.tool);
                for (const std::string& p : variant.parameters)
                    check(p);
            }
        }
    }

    Entries entries_;
};

namespace detail {

inline std::vector<std::string> string_list(const nlohmann::json& doc, const char* what) {
    if (!doc.is_array())
        throw Error("malformed-mapping", std::string(what) + " must be an array of strings");
    std::vector<std::string> out;
    for (const nlohmann::json& item : doc) {
        if (!item.is_string())
            throw Error("malformed-mapping", std::string(what) + " must be an array of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

inline ToolTemplate template_from_json(const nlohmann::json& doc, const std::string& entry_key) {
    if (!doc.is_object())
        throw Error("malformed-mapping", "entry '" + entry_key + "' must be an object");
    for (const char* key : {"environment", "tool", "parameters"})
        if (!doc.contains(key))
            throw Error("malformed-mapping",
                        "entry '" + entry_key + "' lacks required key '" + key + "'");
    ToolTemplate t;
    if (!doc.at("environment").is_string() || !doc.at("tool").is_string())
        throw Error("malformed-mapping",
                    "entry '" + entry_key + "': 'environment' and 'tool' must be strings");
    t.environment = doc.at("environment").get<std::string>();
    t.tool = doc.at("tool").get<std::string>();
    t.parameters = string_list(doc.at("parameters"), "'parameters'");
    if (doc.contains("args"))
        t.args = string_list(doc.at("args"), "'args'");
    if (doc.contains("system"))
        t.system = string_list(doc.at("system"), "'system'");
    return t;
}

} // namespace detail

/// Parses an external catalog document: an object keyed by "kind:FuncType",
/// each value one template object or an array of variant templates.
inline ToolMapping load_tool_mapping(const std::string& document) {
    nlohmann::json doc = nlohmann::json::parse(document, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error("malformed-mapping", "tool mapping is not a JSON object");
    ToolMapping::Entries entries;
    for (const auto& [entry_key, value] : doc.items()) {
        std::size_t colon = entry_key.find(':');
        if (colon == std::string::npos ||
            (entry_key.substr(0, colon) != "scan" && entry_key.substr(0, colon) != "exploit"))
            throw Error("malformed-mapping",
                        "entry key '" + entry_key + "' must look like 'scan:Type' or "
                                                    "'exploit:Type'");
        std::vector<ToolTemplate>& variants = entries[entry_key];
        if (value.is_array())
            for (const nlohmann::json& item : value)
                variants.push_back(detail::template_from_json(item, entry_key));
        else
            variants.push_back(detail::template_from_json(value, entry_key));
    }
    return ToolMapping(std::move(entries));
}

inline nlohmann::json to_json(const ToolTemplate& t) {
    nlohmann::json doc = nlohmann::json::object();
    if (!t.args.empty())
        doc["args"] = t.args;
    doc["environment"] = t.environment;
    doc["tool"] = t.tool;
    doc["parameters"] = t.parameters;
    if (!t.system.empty())
        doc["system"] = t.system;
    return doc;
}

inline nlohmann::json to_json(const ToolMapping& mapping) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [entry_key, variants] : mapping.entries()) {
        if (variants.size() == 1)
            doc[entry_key] = to_json(variants.front());
        else {
            doc[entry_key] = nlohmann::json::array();
            for (const ToolTemplate& t : variants)
                doc[entry_key].push_back(to_json(t));
        }
    }
    return doc;
}

/// The catalog shipped with this artifact. Covers every function type used
/// by the corpus scripts plus generic shell and bus-send tools. `CanSend`'s
/// second variant exposes cyclic sending via `period_ms`/`count`.
inline const ToolMapping& default_tool_mapping() {
    static const ToolMapping mapping{ToolMapping::Entries{
        {"exploit:OpenADB",
         {{{"target"}, "bash", "adb", {"connect", "{target}"}, {}}}},
        {"exploit:ScriptExecution",
         {{{"command"}, "adb", "{command}", {}, {}},
          {{"target", "shell", "file"}, "{shell}", "python", {"{file}"}, {}}}},
        {"scan:BlueBorne",
         {{{"interface"}, "bash", "btscan", {"{interface}"}, {}}}},
        {"exploit:BlueBorne",
         {{{"target"}, "bash", "blueborne", {"{target}"}, {}}}},
        {"exploit:OpenAndroidHotspot",
         {{{"target", "shell"}, "{shell}", "hotspot", {"enable"}, {}}}},
        {"exploit:InstallPythonEnv",
         {{{"target"}, "adb", "pkg", {"install", "python"}, {}}}},
        {"exploit:InstallAndroidCANDosScript",
         {{{"target"}, "adb", "push", {"can-dos"}, {}}}},
        {"exploit:InstallPythonLib",
         {{{"target", "shell"}, "{shell}", "pip", {"install", "python-can"}, {}}}},
        {"exploit:ShellCommand",
         {{{"command"}, "bash", "{command}", {}, {}}}},
        {"exploit:CanSend",
         {{{"frame"}, "bash", "cansend", {"{frame}"}, {}},
          {{"frame", "period_ms", "count"},
           "bash",
           "cansend",
           {"{frame}", "--period-ms", "{period_ms}", "--count", "{count}"},
           {}}}},
    }};
    return mapping;
}

} // namespace alia
