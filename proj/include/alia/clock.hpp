// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Time source abstraction so cyclic senders and timeouts are testable
// without flakiness: tests drive a simulated clock by explicit advance,
// live mode uses the wall clock and really sleeps.

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <thread>

namespace alia {

class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() const = 0;
    virtual void advance_ms(std::int64_t delta_ms) = 0;
};

/// Starts at zero and only moves when advanced. Thread-safe.
class SimulatedClock : public Clock {
public:
    std::int64_t now_ms() const override {
        std::lock_guard<std::mutex> lock(mutex_);
        return now_;
    }

    void advance_ms(std::int64_t delta_ms) override {
        if (delta_ms <= 0)
            return;
        std::lock_guard<std::mutex> lock(mutex_);
        now_ += delta_ms;
    }

private:
    mutable std::mutex mutex_;
    std::int64_t now_ = 0;
};

class WallClock : public Clock {
public:
    std::int64_t now_ms() const override {
        auto now = std::chrono::steady_clock::now().time_since_epoch();
        return std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    }

    void advance_ms(std::int64_t delta_ms) override {
        if (delta_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(delta_ms));
    }
};

inline std::shared_ptr<Clock> make_simulated_clock() { return std::make_shared<SimulatedClock>(); }
inline std::shared_ptr<Clock> make_wall_clock() { return std::make_shared<WallClock>(); }

} // namespace alia
