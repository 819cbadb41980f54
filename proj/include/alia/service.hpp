// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Synchronous HTTP execution service. POST /execute takes a run request
// (compiled script + profile id + options), runs it against a fresh
// simulator instance, and answers with the execution report. The response
// body is byte-identical to what `alia run` writes for the same inputs
// under a simulated clock.

#pragma once

#include <cstdint>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "alia/clock.hpp"
#include "alia/compiled_script.hpp"
#include "alia/errors.hpp"
#include "alia/executor.hpp"
#include "alia/knowledge_base.hpp"
#include "alia/report.hpp"
#include "alia/sim/config.hpp"
#include "alia/sim/simulator.hpp"

namespace alia {

struct RunRequest {
    CompiledScript script;
    std::string profile_id;
    bool wall_clock = false;
    ExecutorOptions options;
};

/// Decodes and schema-checks a run request body.
/// Shape problems are `invalid-script`; only the profile lookup is left
/// to the caller.
inline RunRequest parse_run_request(const std::string& body, ExecutorOptions defaults = {}) {
    nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error("invalid-script", "request body is not a JSON object");
    for (const auto& [key, value] : doc.items())
        if (key != "script" && key != "profile_id" && key != "options")
            throw Error("invalid-script", "unknown request key '" + key + "'");
    if (!doc.contains("script"))
        throw Error("invalid-script", "request lacks 'script'");
    if (!doc.contains("profile_id") || !doc.at("profile_id").is_string())
        throw Error("invalid-script", "request lacks a string 'profile_id'");

    RunRequest req;
    req.script = parse_compiled_script(doc.at("script").dump());
    req.profile_id = doc.at("profile_id").get<std::string>();
    req.options = defaults;
    if (doc.contains("options")) {
        const nlohmann::json& opts = doc.at("options");
        if (!opts.is_object())
            throw Error("invalid-script", "'options' must be an object");
        for (const auto& [key, value] : opts.items())
            if (key != "clock" && key != "loop_cap" && key != "default_timeout_ms")
                throw Error("invalid-script", "unknown option '" + key + "'");
        if (opts.contains("clock")) {
            if (!opts.at("clock").is_string())
                throw Error("invalid-script", "'clock' must be \"simulated\" or \"wall\"");
            std::string clock = opts.at("clock").get<std::string>();
            if (clock != "simulated" && clock != "wall")
                throw Error("invalid-script", "'clock' must be \"simulated\" or \"wall\"");
            req.wall_clock = clock == "wall";
        }
        if (opts.contains("loop_cap")) {
            if (!opts.at("loop_cap").is_number_integer() ||
                opts.at("loop_cap").get<std::int64_t>() <= 0)
                throw Error("invalid-script", "'loop_cap' must be a positive integer");
            req.options.loop_cap = opts.at("loop_cap").get<std::int64_t>();
        }
        if (opts.contains("default_timeout_ms")) {
            if (!opts.at("default_timeout_ms").is_number_integer() ||
                opts.at("default_timeout_ms").get<std::int64_t>() <= 0)
                throw Error("invalid-script", "'default_timeout_ms' must be a positive integer");
            req.options.default_timeout_ms = opts.at("default_timeout_ms").get<std::int64_t>();
        }
    }
    return req;
}

struct ServiceOutcome {
    int status = 200;
    std::string body;
};

class Service {
public:
    explicit Service(ProfileStore profiles, sim::SimConfig sim_config = {},
                     ExecutorOptions defaults = {}, std::size_t max_concurrent = 4)
        : profiles_(std::move(profiles)), sim_config_(std::move(sim_config)),
          defaults_(defaults), slots_(max_concurrent == 0 ? 1 : max_concurrent) {
        wire_routes();
    }

    ~Service() { stop(); }
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// One full run, bounded by the concurrency limit. Every run gets a
    /// fresh simulator, so concurrent requests cannot observe each other.
    ServiceOutcome execute_request(const std::string& body) const {
        RunRequest req;
        try {
            req = parse_run_request(body, defaults_);
        } catch (const Error& e) {
            return error_outcome(400, "invalid-script", e.what());
        }
        const SutProfile* profile = profiles_.find(req.profile_id);
        if (!profile)
            return error_outcome(400, "unknown-profile",
                                 "no profile with id '" + req.profile_id + "'");

        SlotGuard guard(slots_);
        std::shared_ptr<Clock> clock =
            req.wall_clock ? make_wall_clock() : make_simulated_clock();
        sim::Simulator sim(sim_config_, clock);
        Executor exec(*profile, sim.registry(), clock, sim.oracle(), req.options);
        ExecutionReport report = exec.execute(req.script);
        return {200, serialize(report)};
    }

    std::string profiles_body() const {
        nlohmann::json ids = nlohmann::json::array();
        for (const auto& [id, profile] : profiles_.all())
            ids.push_back(id);
        return nlohmann::json{{"profiles", ids}}.dump(2) + "\n";
    }

    /// Binds and serves on a background thread; port 0 picks a free port.
    /// Returns the bound port, or -1 when the bind fails.
    int start(const std::string& host = "127.0.0.1", int port = 0) {
        if (port == 0) {
            port = server_.bind_to_any_port(host);
            if (port < 0)
                return -1;
        } else if (!server_.bind_to_port(host, port)) {
            return -1;
        }
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port;
    }

    /// Blocking variant used by `alia serve`.
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    void stop() {
        if (server_.is_running())
            server_.stop();
        if (thread_.joinable())
            thread_.join();
    }

    const ProfileStore& profiles() const { return profiles_; }

private:
    // Counting semaphore; <semaphore> is skipped to stay friendly to older
    // standard libraries.
    struct Slots {
        explicit Slots(std::size_t count) : free(count) {}
        std::mutex mutex;
        std::condition_variable cv;
        std::size_t free;
    };

    struct SlotGuard {
        explicit SlotGuard(Slots& slots) : slots_(slots) {
            std::unique_lock<std::mutex> lock(slots_.mutex);
            slots_.cv.wait(lock, [&] { return slots_.free > 0; });
            --slots_.free;
        }
        ~SlotGuard() {
            std::lock_guard<std::mutex> lock(slots_.mutex);
            ++slots_.free;
            slots_.cv.notify_one();
        }
        Slots& slots_;
    };

    static ServiceOutcome error_outcome(int status, const std::string& code,
                                        const std::string& detail) {
        return {status, nlohmann::json{{"error", code}, {"detail", detail}}.dump(2) + "\n"};
    }

    void wire_routes() {
        server_.Post("/execute", [this](const httplib::Request& req, httplib::Response& res) {
            ServiceOutcome out = execute_request(req.body);
            res.status = out.status;
            res.set_content(out.body, "application/json");
        });
        server_.Get("/profiles", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(profiles_body(), "application/json");
        });
        server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"status\":\"ok\"}\n", "application/json");
        });
    }

    ProfileStore profiles_;
    sim::SimConfig sim_config_;
    ExecutorOptions defaults_;
    mutable Slots slots_;
    httplib::Server server_;
    std::thread thread_;
};

} // namespace alia
