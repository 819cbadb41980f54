// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Simulated shell adapters. Two flavors share a privilege-aware core
// command table:
//
//   testbed ("bash"): + adb (spawns an Android shell), btscan, blueborne
//     (spawns an Android shell over Bluetooth), cansend
//   android ("adb"/"bbshell"): + hotspot (publishes WIFI), pkg, pip, push,
//     python (runs a payload descriptor from the payload repository)
//
// Every dispatch is also appended to a shared dispatch log so tests can
// compare what was actually sent to the environments across runs.

#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "alia/adapter.hpp"
#include "alia/clock.hpp"
#include "alia/sim/bus.hpp"
#include "alia/sim/config.hpp"
#include "alia/value.hpp"

namespace alia::sim {

struct DispatchRecord {
    std::string session_kind;
    std::string tool;
    std::vector<std::string> parameters;

    friend bool operator==(const DispatchRecord&, const DispatchRecord&) = default;
};

/// State shared by every shell of one simulator instance.
struct SimWorld {
    SimConfig config;
    std::shared_ptr<Clock> clock;
    std::shared_ptr<VirtualBus> bus;

    std::mutex mutex;
    std::vector<DispatchRecord> dispatch_log;

    void record(const std::string& kind, const std::string& tool,
                const std::vector<std::string>& parameters) {
        std::lock_guard<std::mutex> lock(mutex);
        dispatch_log.push_back({kind, tool, parameters});
    }
};

class SimShell : public Adapter {
public:
    enum class Flavor { Testbed, Android };

    SimShell(Flavor flavor, std::string kind, std::shared_ptr<SimWorld> world)
        : flavor_(flavor), kind_(std::move(kind)), world_(std::move(world)) {}

    std::string kind() const override { return kind_; }

    std::vector<std::string> observation_manifest() const override {
        if (flavor_ == Flavor::Android)
            return {"WIFI"};
        return {};
    }

    CommandResult dispatch(const std::string& tool, const std::vector<std::string>& parameters,
                           std::int64_t /*deadline_ms*/) override {
        world_->record(kind_, tool, parameters);
        if (auto it = world_->config.shell_commands.find(tool);
            it != world_->config.shell_commands.end()) {
            if (it->second.status == 0)
                return CommandResult::success(it->second.output);
            return CommandResult::failure("exit status " + std::to_string(it->second.status),
                                          it->second.output);
        }
        if (CommandResult* core = core_command(tool, parameters))
            return std::move(*core);
        if (flavor_ == Flavor::Testbed) {
            if (CommandResult* r = testbed_command(tool, parameters))
                return std::move(*r);
        } else {
            if (CommandResult* r = android_command(tool, parameters))
                return std::move(*r);
        }
        return CommandResult::failure("command not found: " + tool + " (exit 127)");
    }

private:
    // The command helpers return a pointer into `scratch_` (non-null when
    // the tool was recognized) so the dispatcher can fall through cleanly.
    CommandResult* handled(CommandResult result) {
        scratch_ = std::move(result);
        return &scratch_;
    }

    CommandResult* core_command(const std::string& tool,
                                const std::vector<std::string>& parameters) {
        if (tool == "su") {
            privileged_ = true;
            return handled(CommandResult::success(""));
        }
        if (tool == "whoami")
            return handled(CommandResult::success(privileged_ ? "root" : "shell"));
        if (tool == "ls")
            return handled(CommandResult::success("docs payloads tools"));
        if (tool == "echo") {
            std::string joined;
            for (const std::string& p : parameters)
                joined += (joined.empty() ? "" : " ") + p;
            return handled(CommandResult::success(joined));
        }
        if (tool == "true")
            return handled(CommandResult::success(""));
        if (tool == "false")
            return handled(CommandResult::failure("exit status 1"));
        if (tool == "sleep") {
            std::int64_t ms = parameters.empty() ? 0 : parse_int(parameters[0]);
            world_->clock->advance_ms(ms);
            return handled(CommandResult::success(""));
        }
        if (tool == "counter") {
            ++counter_;
            CommandResult r = CommandResult::success(std::to_string(counter_));
            r.value = Value::integer(counter_);
            return handled(std::move(r));
        }
        if (tool == "exit") {
            CommandResult r = CommandResult::success("");
            r.close_session = true;
            return handled(std::move(r));
        }
        return nullptr;
    }

    CommandResult* testbed_command(const std::string& tool,
                                   const std::vector<std::string>& parameters) {
        if (tool == "adb") {
            if (parameters.size() != 2 || parameters[0] != "connect")
                return handled(CommandResult::failure("usage: adb connect <target>"));
            CommandResult r = CommandResult::success("connected to " + parameters[1]);
            r.spawns.push_back({"adb", "adb", make_android_shell()});
            return handled(std::move(r));
        }
        if (tool == "btscan") {
            if (parameters.size() != 1)
                return handled(CommandResult::failure("usage: btscan <interface>"));
            if (parameters[0] != world_->config.bt_interface)
                return handled(
                    CommandResult::failure("no-such-interface: " + parameters[0]));
            CommandResult r = CommandResult::success(world_->config.bt_mac);
            Value target = Value::structured();
            target = target.write_path(std::vector<std::string>{"addr"},
                                       Value::text(world_->config.bt_mac));
            r.value = std::move(target);
            return handled(std::move(r));
        }
        if (tool == "blueborne") {
            if (parameters.size() != 1 || parameters[0].empty())
                return handled(CommandResult::failure("usage: blueborne <target>"));
            CommandResult r = CommandResult::success("shell opened on " + parameters[0]);
            r.spawns.push_back({"bbshell", "bbshell", make_android_shell()});
            return handled(std::move(r));
        }
        if (tool == "cansend")
            return handled(cansend(parameters));
        return nullptr;
    }

    CommandResult* android_command(const std::string& tool,
                                   const std::vector<std::string>& parameters) {
        if (tool == "hotspot") {
            if (parameters.size() != 1 || parameters[0] != "enable")
                return handled(CommandResult::failure("usage: hotspot enable"));
            CommandResult r = CommandResult::success("192.168.43.1");
            r.observations.emplace("WIFI", Value::text("Android"));
            return handled(std::move(r));
        }
        if (tool == "pkg") {
            if (parameters.size() != 2 || parameters[0] != "install")
                return handled(CommandResult::failure("usage: pkg install <name>"));
            return handled(CommandResult::success("installed " + parameters[1]));
        }
        if (tool == "pip") {
            if (parameters.size() != 2 || parameters[0] != "install")
                return handled(CommandResult::failure("usage: pip install <name>"));
            return handled(CommandResult::success("installed " + parameters[1]));
        }
        if (tool == "push") {
            if (parameters.empty())
                return handled(CommandResult::failure("usage: push <file>"));
            return handled(CommandResult::success("pushed " + parameters[0]));
        }
        if (tool == "python") {
            if (parameters.size() != 1)
                return handled(CommandResult::failure("usage: python <payload-file>"));
            return handled(run_payload(parameters[0]));
        }
        return nullptr;
    }

    std::shared_ptr<SimShell> make_android_shell() const {
        return std::make_shared<SimShell>(Flavor::Android, "adb", world_);
    }

    CommandResult cansend(const std::vector<std::string>& parameters) {
        if (parameters.empty())
            return CommandResult::failure("usage: cansend <frame> [--period-ms N --count M]");
        std::optional<CanFrame> frame = try_parse_can_frame(parameters[0]);
        if (!frame)
            return CommandResult::failure("bad-frame: '" + parameters[0] + "'");
        std::int64_t period_ms = 0;
        std::int64_t count = 1;
        for (std::size_t i = 1; i + 1 < parameters.size(); i += 2) {
            if (parameters[i] == "--period-ms")
                period_ms = parse_int(parameters[i + 1]);
            else if (parameters[i] == "--count")
                count = parse_int(parameters[i + 1]);
            else
                return CommandResult::failure("unknown option: " + parameters[i]);
        }
        if (period_ms <= 0) {
            world_->bus->send(*frame);
            return CommandResult::success("sent " + frame->to_text());
        }
        run_cyclic(*frame, period_ms, count);
        return CommandResult::success("sent " + frame->to_text() + " x" +
                                      std::to_string(count));
    }

    /// Cyclic sending blocks the tool for the whole schedule: the clock
    /// advances across it so every frame materializes deterministically.
    void run_cyclic(const CanFrame& frame, std::int64_t period_ms, std::int64_t count) {
        world_->bus->send_cyclic(frame, period_ms, count > 0 ? count : 1);
        world_->clock->advance_ms(period_ms * (count > 0 ? count - 1 : 0));
        (void)world_->bus->log_size(); // force catch-up at the final time
    }

    CommandResult run_payload(const std::string& file) {
        std::filesystem::path path = world_->config.payload_root / file;
        std::ifstream in(path);
        if (!in)
            return CommandResult::failure("no-such-payload: " + path.string());
        std::ostringstream buffer;
        buffer << in.rdbuf();
        nlohmann::json doc = nlohmann::json::parse(buffer.str(), nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            return CommandResult::failure("malformed payload descriptor: " + path.string());
        if (doc.contains("effects"))
            for (const nlohmann::json& effect : doc.at("effects")) {
                if (!effect.is_object() || effect.value("type", "") != "can_send")
                    return CommandResult::failure("unsupported payload effect in " +
                                                  path.string());
                std::optional<CanFrame> frame =
                    try_parse_can_frame(effect.value("frame", ""));
                if (!frame)
                    return CommandResult::failure("bad-frame in payload: " +
                                                  effect.value("frame", ""));
                std::int64_t period_ms = effect.value("period_ms", 0);
                std::int64_t count = effect.value("count", 1);
                if (period_ms <= 0)
                    world_->bus->send(*frame);
                else
                    run_cyclic(*frame, period_ms, count);
            }
        return CommandResult::success(doc.value("output", "payload " + file + " done"));
    }

    static std::int64_t parse_int(const std::string& text) {
        try {
            return std::stoll(text);
        } catch (...) {
            return 0;
        }
    }

    Flavor flavor_;
    std::string kind_;
    std::shared_ptr<SimWorld> world_;
    bool privileged_ = false;
    std::int64_t counter_ = 0;
    CommandResult scratch_;
};

} // namespace alia::sim
