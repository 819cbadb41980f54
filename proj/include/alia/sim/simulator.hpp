// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Facade wiring one simulated target environment: a clock, a virtual CAN
// bus observed by an instrument cluster, a testbed shell as the primary
// session, and the CAN_MESSAGE oracle. One instance per run gives fully
// isolated state.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alia/adapter.hpp"
#include "alia/assertions.hpp"
#include "alia/clock.hpp"
#include "alia/sim/bus.hpp"
#include "alia/sim/config.hpp"
#include "alia/sim/shell.hpp"

namespace alia::sim {

class Simulator {
public:
    explicit Simulator(SimConfig config, std::shared_ptr<Clock> clock = make_simulated_clock())
        : clock_(std::move(clock)), bus_(std::make_shared<VirtualBus>(clock_)),
          world_(std::make_shared<SimWorld>()),
          cluster_(bus_, config.speed_message_id) {
        world_->config = std::move(config);
        world_->clock = clock_;
        world_->bus = bus_;
    }

    /// Primary session table: a single testbed shell named "bash".
    AdapterRegistry registry() const {
        AdapterRegistry r;
        r.add("bash", std::make_shared<SimShell>(SimShell::Flavor::Testbed, "bash", world_));
        return r;
    }

    /// CAN_MESSAGE(frame_text[, window_ms]): true iff a frame with exactly
    /// that id and payload was observed (within the window when given).
    OracleFn oracle() const {
        std::shared_ptr<VirtualBus> bus = bus_;
        return [bus](const std::string& name,
                     const std::vector<Value>& args) -> std::optional<bool> {
            if (name != "CAN_MESSAGE")
                return std::nullopt;
            if (args.empty())
                return false;
            std::optional<CanFrame> frame = try_parse_can_frame(args[0].to_text());
            if (!frame)
                return false;
            std::optional<std::int64_t> window;
            if (args.size() >= 2 && args[1].kind() == Value::Kind::Integer)
                window = args[1].as_integer();
            return bus->seen(*frame, window);
        };
    }

    std::shared_ptr<Clock> clock() const { return clock_; }
    const VirtualBus& bus() const { return *bus_; }
    VirtualBus& bus() { return *bus_; }
    const InstrumentCluster& cluster() const { return cluster_; }
    InstrumentCluster& cluster() { return cluster_; }
    const SimConfig& config() const { return world_->config; }

    std::vector<DispatchRecord> dispatch_log() const {
        std::lock_guard<std::mutex> lock(world_->mutex);
        return world_->dispatch_log;
    }

private:
    std::shared_ptr<Clock> clock_;
    std::shared_ptr<VirtualBus> bus_;
    std::shared_ptr<SimWorld> world_;
    InstrumentCluster cluster_;
};

} // namespace alia::sim
