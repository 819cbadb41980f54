// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// The compiled command format exchanged between compiler and executor. Every
// command carries exactly the keys `environment`, `tool`, `parameters`, plus
// this artifact's documented extension keys: `label`, `phase`, `assign`,
// `timeout_ms`, and for control commands `body`/`else`. Unknown keys are a
// schema violation: scripts are machine-generated, so leniency would only
// hide compiler bugs.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "alia/errors.hpp"

namespace alia {

enum class Phase { Pre, Attack, Post };

inline const char* to_string(Phase phase) {
    switch (phase) {
    case Phase::Pre: return "pre";
    case Phase::Attack: return "attack";
    case Phase::Post: return "post";
    }
    return "attack";
}

inline std::optional<Phase> phase_from_string(const std::string& text) {
    if (text == "pre")
        return Phase::Pre;
    if (text == "attack")
        return Phase::Attack;
    if (text == "post")
        return Phase::Post;
    return std::nullopt;
}

struct CompiledCommand {
    std::string environment;
    std::string tool;
    std::vector<std::string> parameters;
    std::string label;
    Phase phase = Phase::Attack;
    std::optional<std::string> assign; // dotted path receiving the result
    std::vector<CompiledCommand> body; // control commands only
    std::vector<CompiledCommand> else_body;
    std::optional<std::int64_t> timeout_ms;

    /// Control commands are interpreted by the engine itself, not dispatched.
    bool is_control() const {
        return environment == "axe" && (tool == "if" || tool == "while");
    }

    friend bool operator==(const CompiledCommand&, const CompiledCommand&) = default;
};

struct CompiledScript {
    std::vector<CompiledCommand> execute;

    friend bool operator==(const CompiledScript&, const CompiledScript&) = default;
};

inline nlohmann::json to_json(const CompiledCommand& cmd) {
    nlohmann::json doc = nlohmann::json::object();
    doc["environment"] = cmd.environment;
    doc["tool"] = cmd.tool;
    doc["parameters"] = cmd.parameters;
    if (!cmd.label.empty())
        doc["label"] = cmd.label;
    doc["phase"] = to_string(cmd.phase);
    if (cmd.assign)
        doc["assign"] = *cmd.assign;
    if (cmd.timeout_ms)
        doc["timeout_ms"] = *cmd.timeout_ms;
    if (cmd.is_control()) {
        doc["body"] = nlohmann::json::array();
        for (const CompiledCommand& sub : cmd.body)
            doc["body"].push_back(to_json(sub));
        if (!cmd.else_body.empty()) {
            doc["else"] = nlohmann::json::array();
            for (const CompiledCommand& sub : cmd.else_body)
                doc["else"].push_back(to_json(sub));
        }
    }
    return doc;
}

inline nlohmann::json to_json(const CompiledScript& script) {
    nlohmann::json doc = nlohmann::json::object();
    doc["execute"] = nlohmann::json::array();
    for (const CompiledCommand& cmd : script.execute)
        doc["execute"].push_back(to_json(cmd));
    return doc;
}

/// Minified by default; `pretty` uses two-space indentation. Always
/// newline-terminated so written files are well-formed text.
inline std::string serialize(const CompiledScript& script, bool pretty = false) {
    return to_json(script).dump(pretty ? 2 : -1) + "\n";
}

namespace detail {

inline CompiledCommand command_from_json(const nlohmann::json& doc);

inline std::vector<CompiledCommand> command_list_from_json(const nlohmann::json& doc,
                                                           const char* what) {
    if (!doc.is_array())
        throw Error("invalid-script", std::string(what) + " must be an array of commands");
    std::vector<CompiledCommand> out;
    for (const nlohmann::json& item : doc)
        out.push_back(command_from_json(item));
    return out;
}

inline CompiledCommand command_from_json(const nlohmann::json& doc) {
    if (!doc.is_object())
        throw Error("invalid-script", "command must be a JSON object");
    static const std::set<std::string> allowed = {"environment", "tool",   "parameters",
                                                  "label",       "phase",  "assign",
                                                  "timeout_ms",  "body",   "else"};
    for (const auto& [key, value] : doc.items())
        if (!allowed.count(key))
            throw Error("invalid-script", "unknown command key '" + key + "'");
    for (const char* key : {"environment", "tool", "parameters"})
        if (!doc.contains(key))
            throw Error("invalid-script", std::string("command lacks required key '") + key + "'");

    CompiledCommand cmd;
    if (!doc.at("environment").is_string() || !doc.at("tool").is_string())
        throw Error("invalid-script", "'environment' and 'tool' must be strings");
    cmd.environment = doc.at("environment").get<std::string>();
    cmd.tool = doc.at("tool").get<std::string>();
    if (!doc.at("parameters").is_array())
        throw Error("invalid-script", "'parameters' must be an array of strings");
    for (const nlohmann::json& p : doc.at("parameters")) {
        if (!p.is_string())
            throw Error("invalid-script", "'parameters' must be an array of strings");
        cmd.parameters.push_back(p.get<std::string>());
    }
    if (doc.contains("label")) {
        if (!doc.at("label").is_string())
            throw Error("invalid-script", "'label' must be a string");
        cmd.label = doc.at("label").get<std::string>();
    }
    if (doc.contains("phase")) {
        if (!doc.at("phase").is_string())
            throw Error("invalid-script", "'phase' must be one of pre/attack/post");
        std::optional<Phase> phase = phase_from_string(doc.at("phase").get<std::string>());
        if (!phase)
            throw Error("invalid-script", "'phase' must be one of pre/attack/post");
        cmd.phase = *phase;
    }
    if (doc.contains("assign")) {
        if (!doc.at("assign").is_string() || doc.at("assign").get<std::string>().empty())
            throw Error("invalid-script", "'assign' must be a non-empty string");
        cmd.assign = doc.at("assign").get<std::string>();
    }
    if (doc.contains("timeout_ms")) {
        if (!doc.at("timeout_ms").is_number_integer() ||
            doc.at("timeout_ms").get<std::int64_t>() <= 0)
            throw Error("invalid-script", "'timeout_ms' must be a positive integer");
        cmd.timeout_ms = doc.at("timeout_ms").get<std::int64_t>();
    }
    if (doc.contains("body") || doc.contains("else")) {
        if (!cmd.is_control())
            throw Error("invalid-script",
                        "'body'/'else' are only valid on axe if/while commands");
        if (doc.contains("body"))
            cmd.body = command_list_from_json(doc.at("body"), "'body'");
        if (doc.contains("else")) {
            if (cmd.tool != "if")
                throw Error("invalid-script", "'else' is only valid on an if command");
            cmd.else_body = command_list_from_json(doc.at("else"), "'else'");
        }
    }
    return cmd;
}

} // namespace detail

/// Parses and schema-validates a compiled script document.
/// The only error code is `invalid-script`.
inline CompiledScript parse_compiled_script(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error("invalid-script", "compiled script is not a JSON object");
    for (const auto& [key, value] : doc.items())
        if (key != std::string("execute"))
            throw Error("invalid-script", "unknown top-level key '" + key + "'");
    if (!doc.contains("execute"))
        throw Error("invalid-script", "compiled script lacks the 'execute' array");
    CompiledScript script;
    script.execute = detail::command_list_from_json(doc.at("execute"), "'execute'");
    return script;
}

namespace detail {

/// A fully substituted multi-word tool (e.g. from command:'echo done')
/// splits into the tool proper plus leading parameters, the way a shell
/// reads a line. Tools still carrying `{placeholders}` are left alone; the
/// engine splits them again after resolution.
inline void split_tool_words(CompiledCommand& cmd) {
    if (cmd.tool.find(' ') == std::string::npos || cmd.tool.find('{') != std::string::npos)
        return;
    std::vector<std::string> words;
    std::size_t start = 0;
    while (start <= cmd.tool.size()) {
        std::size_t space = cmd.tool.find(' ', start);
        if (space == std::string::npos) {
            words.push_back(cmd.tool.substr(start));
            break;
        }
        words.push_back(cmd.tool.substr(start, space - start));
        start = space + 1;
    }
    std::erase(words, std::string());
    if (words.empty()) {
        cmd.tool.clear();
        return;
    }
    cmd.tool = words.front();
    cmd.parameters.insert(cmd.parameters.begin(), words.begin() + 1, words.end());
}

} // namespace detail

/// Number of non-control commands, including nested ones.
inline std::size_t count_commands(const std::vector<CompiledCommand>& commands) {
    std::size_t n = 0;
    for (const CompiledCommand& cmd : commands) {
        if (cmd.is_control())
            n += count_commands(cmd.body) + count_commands(cmd.else_body);
        else
            ++n;
    }
    return n;
}

inline std::size_t count_commands(const CompiledScript& script) {
    return count_commands(script.execute);
}

} // namespace alia
