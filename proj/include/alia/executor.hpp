// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// The execution engine: interprets a compiled script against a target
// profile and an adapter registry. Core semantics:
//
//   - A FAILED (or skipped) precondition skips the action's attack ("not
//     executed") and its postcondition ("not checked").
//   - A FAILED attack leaves Absent in its assignment target, but the
//     postcondition is still evaluated.
//   - Nothing aborts a run. Every piece of runtime trouble (failed tool,
//     unresolved placeholder, dead session, timeout, loop cap) becomes a
//     FAILED report entry and execution proceeds with the next command.
//
// `{name}` placeholders resolve from the run state first (auxiliary
// variables, published observations), then from the profile. Sessions are
// routed by exact name, then by most recently spawned live session of the
// command's environment kind.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "alia/adapter.hpp"
#include "alia/assertions.hpp"
#include "alia/clock.hpp"
#include "alia/compiled_script.hpp"
#include "alia/knowledge_base.hpp"
#include "alia/report.hpp"
#include "alia/value.hpp"

namespace alia {

struct ExecutorOptions {
    std::int64_t default_timeout_ms = 30000;
    std::int64_t loop_cap = 1000;
};

struct EnvironmentSession {
    std::string name;
    std::string kind;
    std::shared_ptr<Adapter> adapter;
    bool alive = true;
};

struct RunState {
    std::map<std::string, Value> variables;
    std::vector<EnvironmentSession> sessions;
    // Current per-label gate state; a later re-execution of the same label
    // (inside a loop) re-decides it.
    std::set<std::string> pre_failed_labels;
    std::set<std::string> attack_skipped_labels;
};

class Executor {
public:
    Executor(const SutProfile& profile, AdapterRegistry registry, std::shared_ptr<Clock> clock,
             OracleFn oracle = {}, ExecutorOptions options = {})
        : profile_(profile), registry_(std::move(registry)), clock_(std::move(clock)),
          oracle_(std::move(oracle)), options_(options) {}

    /// Runs the whole script and always returns a complete report; the only
    /// way to observe trouble is through FAILED/SKIPPED entries.
    ExecutionReport execute(const CompiledScript& script) {
        report_ = {};
        state_ = {};
        for (const auto& [name, adapter] : registry_.entries())
            state_.sessions.push_back({name, adapter->kind(), adapter, true});
        run_commands(script.execute);
        return std::move(report_);
    }

    const RunState& state() const { return state_; }

private:
    // --- reporting ---

    ReportEntry& add_entry(const CompiledCommand& cmd, StepStatus status, std::string message,
                           std::string output = "") {
        ReportEntry entry;
        entry.seq = static_cast<std::int64_t>(report_.entries.size()) + 1;
        entry.label = cmd.label;
        entry.phase = cmd.phase;
        entry.status = status;
        entry.message = std::move(message);
        entry.output = std::move(output);
        report_.entries.push_back(std::move(entry));
        return report_.entries.back();
    }

    std::string subject(const CompiledCommand& cmd) const {
        const char* noun = cmd.phase == Phase::Pre      ? "Precond"
                           : cmd.phase == Phase::Post   ? "Postcond"
                                                        : "Attack";
        return std::string(noun) + " '" + cmd.label + "'";
    }

    std::string verb_ok(const CompiledCommand& cmd) const {
        return cmd.phase == Phase::Attack ? " executed" : " fulfilled";
    }

    void note_outcome(const CompiledCommand& cmd, StepStatus status) {
        if (cmd.phase == Phase::Pre) {
            if (status == StepStatus::OK)
                state_.pre_failed_labels.erase(cmd.label);
            else
                state_.pre_failed_labels.insert(cmd.label);
        } else if (cmd.phase == Phase::Attack) {
            if (status == StepStatus::SKIPPED)
                state_.attack_skipped_labels.insert(cmd.label);
            else
                state_.attack_skipped_labels.erase(cmd.label);
        }
    }

    // --- variable resolution ---

    /// Run state first, then the profile. Nullopt means unresolvable.
    std::optional<Value> resolve_variable(const std::string& dotted) const {
        std::vector<std::string> path = split_path(dotted);
        if (path.empty())
            return std::nullopt;
        auto it = state_.variables.find(path[0]);
        if (it != state_.variables.end()) {
            if (path.size() == 1)
                return it->second;
            Value sub = it->second.read_path(
                std::vector<std::string>(path.begin() + 1, path.end()));
            if (sub.kind() == Value::Kind::Absent)
                return std::nullopt;
            return sub;
        }
        if (path.size() == 1)
            return resolve(profile_, dotted);
        return std::nullopt;
    }

    /// Assert-evaluation view: unresolvable placeholders read as Absent so
    /// conditions fail by value instead of erroring out.
    Value assert_lookup(const std::string& dotted) const {
        if (std::optional<Value> v = resolve_variable(dotted))
            return *std::move(v);
        return Value::absent();
    }

    /// Substitutes `{name}` placeholders in `text`. On the first
    /// unresolvable name, substitution stops and the name is reported.
    bool substitute_placeholders(std::string& text, std::string& missing) const {
        std::string out;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] != '{') {
                out += text[i];
                continue;
            }
            std::size_t end = text.find('}', i + 1);
            if (end == std::string::npos) {
                out += text.substr(i);
                break;
            }
            std::string name = text.substr(i + 1, end - i - 1);
            std::optional<Value> value = resolve_variable(name);
            if (!value || value->kind() == Value::Kind::Absent) {
                missing = name;
                return false;
            }
            out += value->to_text();
            i = end;
        }
        text = std::move(out);
        return true;
    }

    // --- assignment ---

    void assign_result(const CompiledCommand& cmd, Value value, std::string& message) {
        if (!cmd.assign)
            return;
        std::vector<std::string> path = split_path(*cmd.assign);
        if (path.empty())
            return;
        if (path.size() == 1) {
            state_.variables[path[0]] = std::move(value);
            return;
        }
        Value& root = state_.variables[path[0]];
        bool promoted = false;
        root = root.write_path(std::vector<std::string>(path.begin() + 1, path.end()),
                               std::move(value), &promoted);
        if (promoted)
            message += " (note: '" + path[0] + "' promoted to a structured value)";
    }

    void assign_absent(const CompiledCommand& cmd) {
        std::string ignored;
        assign_result(cmd, Value::absent(), ignored);
    }

    // --- sessions ---

    EnvironmentSession* find_session(const std::string& environment) {
        for (auto it = state_.sessions.rbegin(); it != state_.sessions.rend(); ++it)
            if (it->alive && it->name == environment)
                return &*it;
        for (auto it = state_.sessions.rbegin(); it != state_.sessions.rend(); ++it)
            if (it->alive && it->kind == environment)
                return &*it;
        return nullptr;
    }

    bool session_alive(const std::string& name) const {
        for (const EnvironmentSession& session : state_.sessions)
            if (session.alive && session.name == name)
                return true;
        return false;
    }

    /// Applies a successful result's side effects; returns a failure text
    /// when a spawn collides with a live session name.
    std::string apply_side_effects(const CompiledCommand& cmd, const CommandResult& result,
                                   EnvironmentSession* session) {
        for (const SessionSpawn& spawn : result.spawns) {
            std::string name = spawn.name_hint;
            if (cmd.assign) {
                std::vector<std::string> path = split_path(*cmd.assign);
                if (!path.empty())
                    name = path[0];
            }
            if (name.empty())
                name = spawn.kind;
            if (session_alive(name))
                return "duplicate-session: '" + name + "' is already alive";
            state_.sessions.push_back({name, spawn.kind, spawn.adapter, true});
        }
        for (const auto& [name, value] : result.observations)
            state_.variables[name] = value;
        if (result.close_session && session)
            session->alive = false;
        return "";
    }

    // --- command execution ---

    void run_commands(const std::vector<CompiledCommand>& commands) {
        for (const CompiledCommand& cmd : commands)
            run_command(cmd);
    }

    void run_command(const CompiledCommand& cmd) {
        if (cmd.is_control()) {
            run_control(cmd);
            return;
        }
        // Skip gates, literal semantics of the execution table: a failed
        // precondition skips the attack, a skipped attack skips the check.
        if (cmd.phase == Phase::Attack && state_.pre_failed_labels.count(cmd.label)) {
            note_outcome(cmd, StepStatus::SKIPPED);
            add_entry(cmd, StepStatus::SKIPPED, subject(cmd) + " not executed");
            return;
        }
        if (cmd.phase == Phase::Post && state_.attack_skipped_labels.count(cmd.label)) {
            add_entry(cmd, StepStatus::SKIPPED, subject(cmd) + " not checked");
            return;
        }
        if (cmd.environment == "axe" && cmd.tool == "assert") {
            run_assert(cmd);
            return;
        }
        dispatch_command(cmd);
    }

    void run_assert(const CompiledCommand& cmd) {
        AssertResult result = evaluate_assert(
            cmd.parameters, [this](const std::string& name) { return assert_lookup(name); },
            oracle_);
        if (result.ok) {
            note_outcome(cmd, StepStatus::OK);
            add_entry(cmd, StepStatus::OK, subject(cmd) + verb_ok(cmd));
            return;
        }
        note_outcome(cmd, StepStatus::FAILED);
        std::string message = subject(cmd) + " failed";
        if (!result.detail.empty())
            message += ": " + result.detail;
        add_entry(cmd, StepStatus::FAILED, std::move(message));
    }

    void fail_command(const CompiledCommand& cmd, const std::string& detail,
                      const std::string& output = "") {
        note_outcome(cmd, StepStatus::FAILED);
        assign_absent(cmd);
        std::string message = subject(cmd) + " failed";
        if (!detail.empty())
            message += ": " + detail;
        add_entry(cmd, StepStatus::FAILED, std::move(message), output);
    }

    void dispatch_command(const CompiledCommand& cmd) {
        CompiledCommand resolved = cmd;
        std::string missing;
        if (!substitute_placeholders(resolved.environment, missing) ||
            !substitute_placeholders(resolved.tool, missing)) {
            fail_command(cmd, "unresolved-variable:" + missing);
            return;
        }
        for (std::string& parameter : resolved.parameters)
            if (!substitute_placeholders(parameter, missing)) {
                fail_command(cmd, "unresolved-variable:" + missing);
                return;
            }
        detail::split_tool_words(resolved);

        EnvironmentSession* session = find_session(resolved.environment);
        if (!session) {
            fail_command(cmd, "no-session: no live session named or of kind '" +
                                  resolved.environment + "'");
            return;
        }

        std::int64_t timeout = cmd.timeout_ms.value_or(options_.default_timeout_ms);
        std::int64_t started = clock_->now_ms();
        CommandResult result;
        try {
            result = session->adapter->dispatch(resolved.tool, resolved.parameters, timeout);
        } catch (const std::exception& e) {
            result = CommandResult::failure(std::string("adapter fault: ") + e.what());
        }
        std::int64_t elapsed = clock_->now_ms() - started;
        if (elapsed > timeout) {
            // The result is discarded wholesale: no value, spawns, or
            // observations from a command that blew its deadline.
            fail_command(cmd, "timeout: exceeded " + std::to_string(timeout) + " ms (took " +
                                  std::to_string(elapsed) + " ms)");
            return;
        }
        if (!result.ok) {
            if (result.close_session)
                session->alive = false;
            fail_command(cmd, result.diagnostic, result.output);
            return;
        }

        std::string spawn_error = apply_side_effects(cmd, result, session);
        if (!spawn_error.empty()) {
            fail_command(cmd, spawn_error, result.output);
            return;
        }
        note_outcome(cmd, StepStatus::OK);
        std::string message = subject(cmd) + verb_ok(cmd);
        assign_result(cmd, result.value ? *result.value : Value::text(result.output), message);
        add_entry(cmd, StepStatus::OK, std::move(message), result.output);
    }

    void run_control(const CompiledCommand& cmd) {
        if (cmd.tool == "if") {
            AssertResult cond = evaluate_assert(
                cmd.parameters, [this](const std::string& name) { return assert_lookup(name); },
                oracle_);
            if (cond.malformed) {
                add_entry(cmd, StepStatus::FAILED,
                          "If '" + cmd.label + "' condition invalid: " + cond.detail);
                return;
            }
            add_entry(cmd, StepStatus::OK,
                      "If '" + cmd.label + "' took the " +
                          (cond.ok ? "then" : "else") + " branch");
            run_commands(cond.ok ? cmd.body : cmd.else_body);
            return;
        }
        // while: re-evaluate before each iteration; the hard cap guarantees
        // termination for every script.
        std::int64_t iterations = 0;
        while (true) {
            AssertResult cond = evaluate_assert(
                cmd.parameters, [this](const std::string& name) { return assert_lookup(name); },
                oracle_);
            if (cond.malformed) {
                add_entry(cmd, StepStatus::FAILED,
                          "While '" + cmd.label + "' condition invalid: " + cond.detail);
                return;
            }
            if (!cond.ok)
                break;
            if (iterations >= options_.loop_cap) {
                add_entry(cmd, StepStatus::FAILED,
                          "While '" + cmd.label + "' hit the loop-cap after " +
                              std::to_string(iterations) + " iterations");
                return;
            }
            ++iterations;
            run_commands(cmd.body);
        }
        add_entry(cmd, StepStatus::OK,
                  "While '" + cmd.label + "' completed after " + std::to_string(iterations) +
                      (iterations == 1 ? " iteration" : " iterations"));
    }

    const SutProfile& profile_;
    AdapterRegistry registry_;
    std::shared_ptr<Clock> clock_;
    OracleFn oracle_;
    ExecutorOptions options_;
    RunState state_;
    ExecutionReport report_;
};

/// One-shot convenience wrapper.
inline ExecutionReport execute(const CompiledScript& script, const SutProfile& profile,
                               AdapterRegistry registry, std::shared_ptr<Clock> clock,
                               OracleFn oracle = {}, ExecutorOptions options = {}) {
    Executor executor(profile, std::move(registry), std::move(clock), std::move(oracle), options);
    return executor.execute(script);
}

} // namespace alia
