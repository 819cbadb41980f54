// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Per-target profiles: the knowledge base an attack script is resolved
// against at run time. A profile maps system variable names to values,
// message symbols to concrete CAN frames, and script symbols to payload
// paths. Profiles are immutable after load and shareable across threads.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "alia/can_frame.hpp"
#include "alia/errors.hpp"
#include "alia/value.hpp"

namespace alia {

struct SutProfile {
    std::string id;
    std::map<std::string, std::string> variables;
    std::map<std::string, std::string> messages; // values are CAN frame text
    std::map<std::string, std::string> scripts;  // values are payload paths

    bool operator==(const SutProfile&) const = default;

    /// True when `name` is defined by any of the three maps.
    bool contains(const std::string& name) const {
        return variables.count(name) || messages.count(name) || scripts.count(name);
    }
};

/// Looks `name` up in `variables`, then `messages`, then `scripts`.
/// Absence is a nullopt return, not an error; the caller decides severity.
inline std::optional<Value> resolve(const SutProfile& profile, const std::string& name) {
    if (auto it = profile.variables.find(name); it != profile.variables.end())
        return Value::text(it->second);
    if (auto it = profile.messages.find(name); it != profile.messages.end())
        return Value::text(it->second);
    if (auto it = profile.scripts.find(name); it != profile.scripts.end())
        return Value::text(it->second);
    return std::nullopt;
}

namespace detail {

inline std::map<std::string, std::string> string_map_field(const nlohmann::json& doc,
                                                           const char* key,
                                                           const std::string& id) {
    std::map<std::string, std::string> out;
    if (!doc.contains(key))
        return out;
    const nlohmann::json& section = doc.at(key);
    if (!section.is_object())
        throw Error("malformed-profile",
                    "profile '" + id + "': '" + key + "' must be an object of strings");
    for (const auto& [name, value] : section.items()) {
        if (!value.is_string())
            throw Error("malformed-profile", "profile '" + id + "': value of '" + key + "." +
                                                 name + "' must be a string");
        out.emplace(name, value.get<std::string>());
    }
    return out;
}

} // namespace detail

/// Parses and validates a profile document. Every message value must parse
/// under the CAN frame grammar, and variable and message names must not
/// collide (lookup order would otherwise silently shadow the message).
inline SutProfile load_profile(const std::string& document) {
    nlohmann::json doc = nlohmann::json::parse(document, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error("malformed-profile", "profile document is not a JSON object");
    if (!doc.contains("id") || !doc.at("id").is_string() || doc.at("id").get<std::string>().empty())
        throw Error("malformed-profile", "profile document needs a non-empty string 'id'");

    SutProfile profile;
    profile.id = doc.at("id").get<std::string>();
    profile.variables = detail::string_map_field(doc, "variables", profile.id);
    profile.messages = detail::string_map_field(doc, "messages", profile.id);
    profile.scripts = detail::string_map_field(doc, "scripts", profile.id);

    for (const auto& [symbol, frame] : profile.messages) {
        if (!try_parse_can_frame(frame))
            throw Error("bad-frame", "profile '" + profile.id + "': message '" + symbol +
                                         "' is not a valid CAN frame: '" + frame + "'");
        if (profile.variables.count(symbol))
            throw Error("malformed-profile", "profile '" + profile.id + "': '" + symbol +
                                                 "' appears in both variables and messages");
    }
    return profile;
}

inline nlohmann::json to_json(const SutProfile& profile) {
    nlohmann::json doc = nlohmann::json::object();
    doc["id"] = profile.id;
    doc["variables"] = profile.variables;
    doc["messages"] = profile.messages;
    doc["scripts"] = profile.scripts;
    return doc;
}

inline std::string serialize(const SutProfile& profile) { return to_json(profile).dump(2); }

inline SutProfile load_profile_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("malformed-profile", "cannot open profile file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_profile(buffer.str());
}

/// Directory-backed collection of profiles, keyed by embedded id.
class ProfileStore {
public:
    ProfileStore() = default;

    /// Loads every `*.sut.json` file under `dir` (non-recursive).
    static ProfileStore load_dir(const std::filesystem::path& dir) {
        ProfileStore store;
        if (!std::filesystem::is_directory(dir))
            throw Error("malformed-profile", "not a profile directory: " + dir.string());
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().string().ends_with(".sut.json"))
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files)
            store.add(load_profile_file(file));
        return store;
    }

    void add(SutProfile profile) {
        if (profiles_.count(profile.id))
            throw Error("malformed-profile", "duplicate profile id '" + profile.id + "'");
        profiles_.emplace(profile.id, std::move(profile));
    }

    const SutProfile* find(const std::string& id) const {
        auto it = profiles_.find(id);
        return it == profiles_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, SutProfile>& all() const { return profiles_; }

private:
    std::map<std::string, SutProfile> profiles_;
};

} // namespace alia
