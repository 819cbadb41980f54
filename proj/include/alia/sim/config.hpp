// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Simulator configuration: Bluetooth responder identity, the instrument
// cluster's speed-message id, the payload repository root, and optional
// overrides for individual shell commands (fixed status/output stubs).

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "alia/errors.hpp"

namespace alia::sim {

struct ShellOverride {
    int status = 0;
    std::string output;
};

struct SimConfig {
    std::string bt_interface = "hci0";
    std::string bt_mac = "AA:BB:CC:DD:EE:FF";
    std::uint32_t speed_message_id = 0x201;
    std::filesystem::path payload_root; // resolved against the config file dir
    std::map<std::string, ShellOverride> shell_commands;
};

namespace detail {

inline std::uint32_t parse_message_id(const std::string& text) {
    if (text.empty() || text.size() > 8)
        throw Error("malformed-sim-config", "bad speed_message_id '" + text + "'");
    std::uint32_t id = 0;
    for (char c : text) {
        int d;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (c >= 'A' && c <= 'F')
            d = c - 'A' + 10;
        else if (c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else
            throw Error("malformed-sim-config", "bad speed_message_id '" + text + "'");
        id = id << 4 | static_cast<std::uint32_t>(d);
    }
    return id;
}

} // namespace detail

inline SimConfig load_sim_config(const std::string& document,
                                 const std::filesystem::path& base_dir) {
    nlohmann::json doc = nlohmann::json::parse(document, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error("malformed-sim-config", "simulator config is not a JSON object");
    SimConfig config;
    config.payload_root = base_dir;
    if (doc.contains("bt_interface"))
        config.bt_interface = doc.at("bt_interface").get<std::string>();
    if (doc.contains("bt_mac"))
        config.bt_mac = doc.at("bt_mac").get<std::string>();
    if (doc.contains("speed_message_id"))
        config.speed_message_id =
            detail::parse_message_id(doc.at("speed_message_id").get<std::string>());
    if (doc.contains("payload_root"))
        config.payload_root = base_dir / doc.at("payload_root").get<std::string>();
    if (doc.contains("shell_commands")) {
        const nlohmann::json& overrides = doc.at("shell_commands");
        if (!overrides.is_object())
            throw Error("malformed-sim-config", "'shell_commands' must be an object");
        for (const auto& [tool, spec] : overrides.items()) {
            ShellOverride override;
            if (spec.contains("status"))
                override.status = spec.at("status").get<int>();
            if (spec.contains("output"))
                override.output = spec.at("output").get<std::string>();
            config.shell_commands.emplace(tool, std::move(override));
        }
    }
    return config;
}

inline SimConfig load_sim_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("malformed-sim-config", "cannot open simulator config: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_sim_config(buffer.str(), path.parent_path());
}

} // namespace alia::sim
