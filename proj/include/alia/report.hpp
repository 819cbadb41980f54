// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// The execution report: one entry per executed (or skipped) command, in
// execution order with seq counting from 1. Serializes to a bare JSON array
// and to a three-column human table (Time / Status / Debug message).

#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "alia/compiled_script.hpp"

namespace alia {

enum class StepStatus { OK, FAILED, SKIPPED };

inline const char* to_string(StepStatus status) {
    switch (status) {
    case StepStatus::OK: return "OK";
    case StepStatus::FAILED: return "FAILED";
    case StepStatus::SKIPPED: return "SKIPPED";
    }
    return "FAILED";
}

struct ReportEntry {
    std::int64_t seq = 0;
    std::string label;
    Phase phase = Phase::Attack;
    StepStatus status = StepStatus::OK;
    std::string message;
    std::string output;

    friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

struct ExecutionReport {
    std::vector<ReportEntry> entries;

    std::vector<StepStatus> status_sequence() const {
        std::vector<StepStatus> out;
        out.reserve(entries.size());
        for (const ReportEntry& entry : entries)
            out.push_back(entry.status);
        return out;
    }

    bool any_failed() const {
        for (const ReportEntry& entry : entries)
            if (entry.status == StepStatus::FAILED)
                return true;
        return false;
    }

    friend bool operator==(const ExecutionReport&, const ExecutionReport&) = default;
};

inline nlohmann::json to_json(const ReportEntry& entry) {
    nlohmann::json doc = nlohmann::json::object();
    doc["seq"] = entry.seq;
    doc["label"] = entry.label;
    doc["phase"] = to_string(entry.phase);
    doc["status"] = to_string(entry.status);
    doc["message"] = entry.message;
    doc["output"] = entry.output;
    return doc;
}

inline nlohmann::json to_json(const ExecutionReport& report) {
    nlohmann::json doc = nlohmann::json::array();
    for (const ReportEntry& entry : report.entries)
        doc.push_back(to_json(entry));
    return doc;
}

/// Canonical report serialization; CLI run output and the HTTP response body
/// both use exactly this form, which is what makes them byte-comparable.
inline std::string serialize(const ExecutionReport& report) {
    return to_json(report).dump(2) + "\n";
}

/// Three-column table: Time, Status, Debug message.
inline std::string format_table(const ExecutionReport& report) {
    std::size_t time_width = 4; // "Time"
    for (const ReportEntry& entry : report.entries)
        time_width = std::max(time_width, std::to_string(entry.seq).size());
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(time_width) + 2) << "Time"
        << std::setw(9) << "Status" << "Debug message\n";
    for (const ReportEntry& entry : report.entries)
        out << std::left << std::setw(static_cast<int>(time_width) + 2) << entry.seq
            << std::setw(9) << to_string(entry.status) << entry.message << "\n";
    return out.str();
}

} // namespace alia
