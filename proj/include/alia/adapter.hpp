// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// The boundary between the execution engine and tool environments. An
// adapter receives one already-resolved command at a time and answers with a
// result that may carry a value, spawn follow-up sessions (a reverse shell),
// publish observations into the run state, or close its own session. All
// runtime trouble is expressed in the result; adapters should not throw.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "alia/value.hpp"

namespace alia {

class Adapter;

/// Request to open a new session once the spawning command succeeded. The
/// engine prefers the command's assignment target as the session name and
/// falls back to `name_hint`.
struct SessionSpawn {
    std::string name_hint;
    std::string kind;
    std::shared_ptr<Adapter> adapter;
};

struct CommandResult {
    bool ok = true;
    std::string output;
    std::string diagnostic; // failure detail, appended to the report message
    std::optional<Value> value; // result richer than plain output text
    std::vector<SessionSpawn> spawns;
    std::map<std::string, Value> observations; // names from the adapter manifest
    bool close_session = false;

    static CommandResult failure(std::string diagnostic, std::string output = "") {
        CommandResult r;
        r.ok = false;
        r.diagnostic = std::move(diagnostic);
        r.output = std::move(output);
        return r;
    }

    static CommandResult success(std::string output = "") {
        CommandResult r;
        r.output = std::move(output);
        return r;
    }
};

class Adapter {
public:
    virtual ~Adapter() = default;

    /// Environment kind used for routing when no session name matches
    /// exactly (e.g. "bash", "adb").
    virtual std::string kind() const = 0;

    /// Observation names this adapter may publish; consulted by static
    /// analysis so conditions over them do not trip the undefined check.
    virtual std::vector<std::string> observation_manifest() const { return {}; }

    /// Executes one command. `deadline_ms` is advisory: the engine accounts
    /// elapsed clock time against it after the call returns.
    virtual CommandResult dispatch(const std::string& tool,
                                   const std::vector<std::string>& parameters,
                                   std::int64_t deadline_ms) = 0;
};

/// Initial session table for a run: ordered (name, adapter) pairs, first
/// entry is the primary shell.
class AdapterRegistry {
public:
    using Entry = std::pair<std::string, std::shared_ptr<Adapter>>;

    AdapterRegistry& add(std::string name, std::shared_ptr<Adapter> adapter) {
        entries_.emplace_back(std::move(name), std::move(adapter));
        return *this;
    }

    const std::vector<Entry>& entries() const { return entries_; }

    std::shared_ptr<Adapter> find(const std::string& name) const {
        for (const Entry& entry : entries_)
            if (entry.first == name)
                return entry.second;
        return nullptr;
    }

    /// Union of all adapters' observation manifests.
    std::vector<std::string> observation_names() const {
        std::vector<std::string> out;
        for (const Entry& entry : entries_)
            for (const std::string& name : entry.second->observation_manifest())
                if (std::find(out.begin(), out.end(), name) == out.end())
                    out.push_back(name);
        return out;
    }

private:
    std::vector<Entry> entries_;
};

} // namespace alia
