// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// alia command line: check / compile / run / serve.
//
// Exit codes: 0 success (clean or warnings only), 1 language errors or any
// FAILED report entry, 2 usage or unusable input (unreadable file, malformed
// JSON document, failed bind).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <alia/alia.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw alia::Error("io-error", "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw alia::Error("io-error", "cannot write " + path.string());
    out << content;
}

nlohmann::json diagnostics_json(const std::vector<alia::Diagnostic>& diags) {
    nlohmann::json out = nlohmann::json::array();
    for (const alia::Diagnostic& d : diags)
        out.push_back({{"severity", alia::to_string(d.severity)},
                       {"code", d.code},
                       {"message", d.message},
                       {"line", d.span.line},
                       {"column", d.span.column_start}});
    return out;
}

int cmd_check(const std::string& file, const std::string& profile_path, bool json_output) {
    std::string source = read_file(file);
    auto [ast, diags] = alia::parse(source);

    alia::AnalyzerOptions options;
    alia::SutProfile profile;
    if (!profile_path.empty()) {
        profile = alia::load_profile_file(profile_path);
        options.profile = &profile;
    }
    std::vector<alia::Diagnostic> more = alia::check(ast, options);
    diags.insert(diags.end(), more.begin(), more.end());
    alia::sort_diagnostics(diags);

    if (json_output) {
        std::cout << diagnostics_json(diags).dump(2) << "\n";
    } else {
        for (const alia::Diagnostic& d : diags)
            std::cout << d.format(file) << "\n";
    }
    return alia::has_errors(diags) ? kExitDiagnostics : kExitOk;
}

int cmd_compile(const std::string& file, const std::string& mapping_path,
                const std::string& out_path, bool pretty) {
    std::string source = read_file(file);
    auto [ast, diags] = alia::parse(source);
    std::vector<alia::Diagnostic> more = alia::check(ast);
    diags.insert(diags.end(), more.begin(), more.end());
    alia::sort_diagnostics(diags);
    for (const alia::Diagnostic& d : diags)
        std::cerr << d.format(file) << "\n";
    if (alia::has_errors(diags))
        return kExitDiagnostics;

    alia::ToolMapping mapping = alia::default_tool_mapping();
    if (!mapping_path.empty())
        mapping = alia::load_tool_mapping(read_file(mapping_path));

    alia::CompiledScript script;
    try {
        script = alia::compile(ast, mapping);
    } catch (const alia::Error& e) {
        std::cerr << "ERROR " << e.what() << "\n";
        return kExitDiagnostics;
    }

    std::string body = alia::serialize(script, pretty);
    if (out_path.empty())
        std::cout << body;
    else
        write_file(out_path, body);
    return kExitOk;
}

nlohmann::json bus_log_json(const alia::sim::VirtualBus& bus) {
    nlohmann::json out = nlohmann::json::array();
    for (const alia::sim::BusLogEntry& entry : bus.log())
        out.push_back({{"timestamp_ms", entry.timestamp_ms}, {"frame", entry.frame.to_text()}});
    return out;
}

int cmd_run(const std::string& script_path, const std::string& profile_path,
            const std::string& sim_path, const std::string& report_path,
            const std::string& bus_log_path, bool table, bool no_fail_on_failed,
            bool wall_clock, std::int64_t loop_cap, std::int64_t timeout_ms) {
    alia::CompiledScript script = alia::parse_compiled_script(read_file(script_path));
    alia::SutProfile profile = alia::load_profile_file(profile_path);

    alia::sim::SimConfig config;
    if (!sim_path.empty()) {
        config = alia::sim::load_sim_config_file(sim_path);
    } else {
        // Payload descriptors named by the profile resolve next to it.
        config.payload_root = std::filesystem::path(profile_path).parent_path();
    }

    alia::ExecutorOptions options;
    if (loop_cap > 0)
        options.loop_cap = loop_cap;
    if (timeout_ms > 0)
        options.default_timeout_ms = timeout_ms;

    std::shared_ptr<alia::Clock> clock =
        wall_clock ? alia::make_wall_clock() : alia::make_simulated_clock();
    alia::sim::Simulator sim(config, clock);
    alia::Executor executor(profile, sim.registry(), clock, sim.oracle(), options);
    alia::ExecutionReport report = executor.execute(script);

    std::string body = alia::serialize(report);
    if (!report_path.empty())
        write_file(report_path, body);
    if (table)
        std::cout << alia::format_table(report);
    else if (report_path.empty())
        std::cout << body;
    if (!bus_log_path.empty())
        write_file(bus_log_path, bus_log_json(sim.bus()).dump(2) + "\n");

    if (report.any_failed() && !no_fail_on_failed)
        return kExitDiagnostics;
    return kExitOk;
}

int cmd_serve(const std::string& host, int port, const std::string& profiles_dir,
              const std::string& sim_path, std::size_t concurrency) {
    std::string dir = profiles_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("ALIA_PROFILE_DIR"))
            dir = env;
    }
    if (dir.empty()) {
        std::cerr << "ERROR io-error: no profile directory (--profiles or ALIA_PROFILE_DIR)\n";
        return kExitUsage;
    }
    alia::ProfileStore store = alia::ProfileStore::load_dir(dir);

    alia::sim::SimConfig config;
    if (!sim_path.empty())
        config = alia::sim::load_sim_config_file(sim_path);
    else
        config.payload_root = std::filesystem::path(dir);

    alia::Service service(std::move(store), std::move(config), {}, concurrency);
    std::cout << "alia service listening on " << host << ":" << port << "\n";
    if (!service.listen(host, port)) {
        std::cerr << "ERROR io-error: cannot bind " << host << ":" << port << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"alia: attack-description language toolchain"};
    app.require_subcommand(1);

    std::string check_file, check_profile;
    bool check_json = false;
    CLI::App* check = app.add_subcommand("check", "Parse and statically check a script");
    check->add_option("file", check_file, "attack description (.alia)")->required();
    check->add_option("--profile", check_profile, "SUT profile (.sut.json)");
    check->add_flag("--json", check_json, "emit diagnostics as JSON");

    std::string compile_file, compile_mapping, compile_out;
    bool compile_pretty = false;
    CLI::App* compile = app.add_subcommand("compile", "Compile a script to executable JSON");
    compile->add_option("file", compile_file, "attack description (.alia)")->required();
    compile->add_option("--mapping", compile_mapping, "tool-mapping catalog (JSON)");
    compile->add_option("-o,--output", compile_out, "output path (default stdout)");
    compile->add_flag("--pretty", compile_pretty, "indent the output");

    std::string run_script, run_profile, run_sim, run_report, run_bus_log;
    bool run_table = false, run_no_fail = false, run_wall = false;
    std::int64_t run_loop_cap = 0, run_timeout = 0;
    CLI::App* run = app.add_subcommand("run", "Execute a compiled script against the simulator");
    run->add_option("script", run_script, "compiled script (JSON)")->required();
    run->add_option("--profile", run_profile, "SUT profile (.sut.json)")->required();
    run->add_option("--sim", run_sim, "simulator config (JSON)");
    run->add_option("--report", run_report, "write the report JSON here");
    run->add_option("--bus-log", run_bus_log, "write the CAN bus log here");
    run->add_flag("--table", run_table, "print the report as a table");
    run->add_flag("--no-fail-on-failed", run_no_fail, "exit 0 even when entries FAILED");
    run->add_flag("--wall-clock", run_wall, "use the wall clock instead of simulated time");
    run->add_option("--loop-cap", run_loop_cap, "iteration cap for while blocks");
    run->add_option("--timeout-ms", run_timeout, "default per-command timeout");

    std::string serve_host = "127.0.0.1", serve_profiles, serve_sim;
    int serve_port = 8087;
    std::size_t serve_concurrency = 4;
    CLI::App* serve = app.add_subcommand("serve", "Run the HTTP execution service");
    serve->add_option("--host", serve_host, "bind address");
    serve->add_option("--port", serve_port, "bind port");
    serve->add_option("--profiles", serve_profiles, "directory of *.sut.json profiles");
    serve->add_option("--sim", serve_sim, "simulator config (JSON)");
    serve->add_option("--concurrency", serve_concurrency, "max concurrent runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (check->parsed())
            return cmd_check(check_file, check_profile, check_json);
        if (compile->parsed())
            return cmd_compile(compile_file, compile_mapping, compile_out, compile_pretty);
        if (run->parsed())
            return cmd_run(run_script, run_profile, run_sim, run_report, run_bus_log, run_table,
                           run_no_fail, run_wall, run_loop_cap, run_timeout);
        if (serve->parsed())
            return cmd_serve(serve_host, serve_port, serve_profiles, serve_sim,
                             serve_concurrency);
    } catch (const alia::Error& e) {
        std::cerr << "ERROR " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "ERROR internal: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
