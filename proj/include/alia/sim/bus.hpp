// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Virtual CAN bus with an append-only observation log and cyclic senders.
// Senders do not own threads: due frames are materialized lazily whenever
// the bus is touched, ordered by due time (registration order breaks ties),
// which keeps runs deterministic under a simulated clock. Under a wall
// clock the same catch-up happens on access, so the log is always current
// when read.

#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "alia/can_frame.hpp"
#include "alia/clock.hpp"

namespace alia::sim {

struct BusLogEntry {
    std::int64_t timestamp_ms = 0;
    CanFrame frame;

    friend bool operator==(const BusLogEntry&, const BusLogEntry&) = default;
};

class VirtualBus {
public:
    explicit VirtualBus(std::shared_ptr<Clock> clock) : clock_(std::move(clock)) {}

    void send(const CanFrame& frame) {
        std::lock_guard<std::mutex> lock(mutex_);
        catch_up_locked();
        log_.push_back({clock_->now_ms(), frame});
    }

    /// Registers a cyclic sender: first frame due immediately, then every
    /// `period_ms`, `count` frames in total (0 means unlimited).
    void send_cyclic(const CanFrame& frame, std::int64_t period_ms, std::int64_t count) {
        std::lock_guard<std::mutex> lock(mutex_);
        catch_up_locked();
        CyclicSender sender;
        sender.frame = frame;
        sender.period_ms = period_ms > 0 ? period_ms : 1;
        sender.remaining = count;
        sender.next_due_ms = clock_->now_ms();
        sender.order = next_order_++;
        senders_.push_back(std::move(sender));
        catch_up_locked();
    }

    std::vector<BusLogEntry> log() const {
        std::lock_guard<std::mutex> lock(mutex_);
        catch_up_locked();
        return log_;
    }

    /// True iff `frame` appears in the log, optionally only within the last
    /// `window_ms` of simulated time.
    bool seen(const CanFrame& frame, std::optional<std::int64_t> window_ms = std::nullopt) const {
        std::lock_guard<std::mutex> lock(mutex_);
        catch_up_locked();
        std::int64_t horizon =
            window_ms ? clock_->now_ms() - *window_ms : std::numeric_limits<std::int64_t>::min();
        for (const BusLogEntry& entry : log_)
            if (entry.timestamp_ms >= horizon && entry.frame == frame)
                return true;
        return false;
    }

    std::size_t log_size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        catch_up_locked();
        return log_.size();
    }

private:
    struct CyclicSender {
        CanFrame frame;
        std::int64_t period_ms = 1;
        std::int64_t remaining = 0; // 0 = unlimited
        std::int64_t next_due_ms = 0;
        std::uint64_t order = 0;
    };

    /// Appends every due cyclic frame up to the current time, cheapest-due
    /// first. Requires mutex_ held.
    void catch_up_locked() const {
        std::int64_t now = clock_->now_ms();
        while (true) {
            CyclicSender* due = nullptr;
            for (CyclicSender& sender : senders_)
                if (sender.next_due_ms <= now &&
                    (!due || sender.next_due_ms < due->next_due_ms ||
                     (sender.next_due_ms == due->next_due_ms && sender.order < due->order)))
                    due = &sender;
            if (!due)
                break;
            log_.push_back({due->next_due_ms, due->frame});
            due->next_due_ms += due->period_ms;
            if (due->remaining > 0 && --due->remaining == 0)
                std::erase_if(senders_, [&](const CyclicSender& s) { return &s == due; });
        }
    }

    std::shared_ptr<Clock> clock_;
    mutable std::mutex mutex_;
    mutable std::vector<BusLogEntry> log_;
    mutable std::vector<CyclicSender> senders_;
    mutable std::uint64_t next_order_ = 0;
};

/// Watches the bus for frames with the configured speed-message id; the
/// needle deflects on the first sighting and stays deflected until reset.
class InstrumentCluster {
public:
    InstrumentCluster(std::shared_ptr<const VirtualBus> bus, std::uint32_t speed_message_id)
        : bus_(std::move(bus)), speed_message_id_(speed_message_id) {}

    bool needle_deflected() const {
        for (const BusLogEntry& entry : snapshot())
            if (entry.frame.id == speed_message_id_)
                return true;
        return false;
    }

    /// Payload bytes of the most recent speed-message frame, empty if none.
    std::vector<std::uint8_t> last_payload() const {
        std::vector<BusLogEntry> entries = snapshot();
        const BusLogEntry* match = nullptr;
        for (const BusLogEntry& entry : entries)
            if (entry.frame.id == speed_message_id_)
                match = &entry;
        return match ? match->frame.data : std::vector<std::uint8_t>{};
    }

    void reset() { watermark_ = bus_->log_size(); }

    std::uint32_t speed_message_id() const { return speed_message_id_; }

private:
    std::vector<BusLogEntry> snapshot() const {
        std::vector<BusLogEntry> entries = bus_->log();
        if (watermark_ < entries.size())
            return {entries.begin() + static_cast<std::ptrdiff_t>(watermark_), entries.end()};
        return {};
    }

    std::shared_ptr<const VirtualBus> bus_;
    std::uint32_t speed_message_id_;
    std::size_t watermark_ = 0;
};

} // namespace alia::sim
