// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <alia/compiler.hpp>
#include <alia/executor.hpp>
#include <alia/parser.hpp>

#include "generators.hpp"

using namespace alia;

namespace {

struct ScriptedAdapter final : Adapter {
    using Fn = std::function<CommandResult(const std::string&, const std::vector<std::string>&)>;

    ScriptedAdapter(std::string kind, Fn fn) : kind_(std::move(kind)), fn_(std::move(fn)) {}

    std::string kind() const override { return kind_; }
    CommandResult dispatch(const std::string& tool, const std::vector<std::string>& parameters,
                           std::int64_t) override {
        return fn_(tool, parameters);
    }

    std::string kind_;
    Fn fn_;
};

std::shared_ptr<ScriptedAdapter> echo_adapter(std::string kind = "bash") {
    return std::make_shared<ScriptedAdapter>(
        std::move(kind), [](const std::string& tool, const std::vector<std::string>& params) {
            std::string out = tool;
            for (const std::string& p : params)
                out += " " + p;
            return CommandResult::success(out);
        });
}

CompiledCommand attack(std::string label, std::string env, std::string tool,
                       std::vector<std::string> params = {}) {
    CompiledCommand cmd;
    cmd.label = std::move(label);
    cmd.environment = std::move(env);
    cmd.tool = std::move(tool);
    cmd.parameters = std::move(params);
    return cmd;
}

CompiledCommand assertion(std::string label, Phase phase, std::vector<std::string> tokens) {
    CompiledCommand cmd;
    cmd.label = std::move(label);
    cmd.environment = "axe";
    cmd.tool = "assert";
    cmd.phase = phase;
    cmd.parameters = std::move(tokens);
    return cmd;
}

SutProfile profile_with(std::map<std::string, std::string> variables) {
    SutProfile p;
    p.id = "test";
    p.variables = std::move(variables);
    return p;
}

ExecutionReport run(const CompiledScript& script, const SutProfile& profile,
                    AdapterRegistry registry, ExecutorOptions options = {}, OracleFn oracle = {}) {
    return execute(script, profile, std::move(registry), make_simulated_clock(),
                   std::move(oracle), options);
}

} // namespace

TEST_CASE("pre failure skips the attack and its postcondition") {
    CompiledScript script;
    script.execute.push_back(assertion("a", Phase::Pre, {"==", "x", "y"}));
    script.execute.push_back(attack("a", "bash", "tool"));
    script.execute.push_back(assertion("a", Phase::Post, {"==", "x", "x"}));

    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", echo_adapter()));
    REQUIRE(report.entries.size() == 3);
    CHECK(report.status_sequence() ==
          std::vector<StepStatus>{StepStatus::FAILED, StepStatus::SKIPPED, StepStatus::SKIPPED});
    CHECK(report.entries[0].message == "Precond 'a' failed: 'x' == 'y' does not hold");
    CHECK(report.entries[1].message == "Attack 'a' not executed");
    CHECK(report.entries[2].message == "Postcond 'a' not checked");
}

TEST_CASE("attack failure still checks the postcondition against an absent result") {
    auto failer = std::make_shared<ScriptedAdapter>(
        "bash", [](const std::string&, const std::vector<std::string>&) {
            return CommandResult::failure("boom");
        });
    CompiledScript script;
    CompiledCommand cmd = attack("a", "bash", "tool");
    cmd.assign = "r";
    script.execute.push_back(cmd);
    script.execute.push_back(assertion("a", Phase::Post, {"truthy", "{r}"}));

    ExecutionReport report = run(script, profile_with({}), AdapterRegistry().add("bash", failer));
    REQUIRE(report.entries.size() == 2);
    CHECK(report.entries[0].status == StepStatus::FAILED);
    CHECK(report.entries[0].message == "Attack 'a' failed: boom");
    CHECK(report.entries[1].status == StepStatus::FAILED); // evaluated, not skipped
    CHECK(report.entries[1].message ==
          "Postcond 'a' failed: condition [truthy {r}] evaluated to false");
}

TEST_CASE("successful pipeline assigns output and fulfills conditions") {
    CompiledScript script;
    script.execute.push_back(assertion("a", Phase::Pre, {"==", "go", "go"}));
    CompiledCommand cmd = attack("a", "bash", "whoami");
    cmd.assign = "who";
    script.execute.push_back(cmd);
    script.execute.push_back(assertion("a", Phase::Post, {"==", "{who}", "whoami"}));

    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", echo_adapter()));
    CHECK(report.status_sequence() ==
          std::vector<StepStatus>{StepStatus::OK, StepStatus::OK, StepStatus::OK});
    CHECK(report.entries[1].output == "whoami");
    CHECK_FALSE(report.any_failed());
}

TEST_CASE("parameters resolve from run state first, then the profile") {
    CompiledScript script;
    CompiledCommand set = attack("set", "bash", "produce");
    set.assign = "name";
    script.execute.push_back(set);
    script.execute.push_back(attack("use", "bash", "consume", {"{name}", "{ip_addr}"}));

    ExecutionReport report = run(script, profile_with({{"ip_addr", "192.168.1.1"}}),
                                 AdapterRegistry().add("bash", echo_adapter()));
    REQUIRE(report.entries.size() == 2);
    CHECK(report.entries[1].output == "consume produce 192.168.1.1");
}

TEST_CASE("unresolved placeholder fails the command and names the variable") {
    CompiledScript script;
    CompiledCommand cmd = attack("a", "bash", "tool", {"{nowhere}"});
    cmd.assign = "r";
    script.execute.push_back(cmd);
    script.execute.push_back(assertion("a", Phase::Post, {"truthy", "{r}"}));

    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", echo_adapter()));
    CHECK(report.entries[0].status == StepStatus::FAILED);
    CHECK(report.entries[0].message == "Attack 'a' failed: unresolved-variable:nowhere");
    // The assignment target was reset to absent.
    CHECK(report.entries[1].status == StepStatus::FAILED);
}

TEST_CASE("tool placeholders substitute and re-split into words") {
    CompiledScript script;
    script.execute.push_back(attack("a", "bash", "{cmdline}"));
    ExecutionReport report = run(script, profile_with({{"cmdline", "echo hello world"}}),
                                 AdapterRegistry().add("bash", echo_adapter()));
    // The adapter sees tool "echo" with parameters ["hello", "world"].
    CHECK(report.entries[0].output == "echo hello world");
}

TEST_CASE("dotted placeholder reads into structured state") {
    auto structured = std::make_shared<ScriptedAdapter>(
        "bash", [](const std::string&, const std::vector<std::string>&) {
            CommandResult r = CommandResult::success("scan done");
            r.value = Value::structured({{"addr", Value::text("AA:BB")}});
            return r;
        });
    CompiledScript script;
    CompiledCommand scan = attack("scan", "bash", "scan");
    scan.assign = "target";
    script.execute.push_back(scan);

    AdapterRegistry registry;
    registry.add("bash", structured).add("echo", echo_adapter("echo"));
    CompiledCommand use = attack("use", "echo", "show", {"{target.addr}"});
    script.execute.push_back(use);

    ExecutionReport report = run(script, profile_with({}), registry);
    CHECK(report.entries[1].output == "show AA:BB");
}

TEST_CASE("dotted assignment writes into structured state and notes promotion") {
    CompiledScript script;
    CompiledCommand seed = attack("seed", "bash", "plain text");
    seed.assign = "box";
    script.execute.push_back(seed);
    CompiledCommand nested = attack("nest", "bash", "10.0.0.7");
    nested.assign = "box.ip";
    script.execute.push_back(nested);
    script.execute.push_back(attack("use", "bash", "dial", {"{box.ip}"}));

    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", echo_adapter()));
    REQUIRE(report.entries.size() == 3);
    // Writing a field over the text value replaces it and says so.
    CHECK(report.entries[1].message ==
          "Attack 'nest' executed (note: 'box' promoted to a structured value)");
    CHECK(report.entries[2].output == "dial 10.0.0.7");
}

TEST_CASE("environment routing prefers exact session name, then kind, then fails") {
    CompiledScript script;
    script.execute.push_back(attack("by_name", "shell_b", "t1"));
    script.execute.push_back(attack("by_kind", "zsh", "t2"));
    script.execute.push_back(attack("nowhere", "ksh", "t3"));

    AdapterRegistry registry;
    registry.add("shell_a", echo_adapter("zsh")).add("shell_b", echo_adapter("zsh"));
    ExecutionReport report = run(script, profile_with({}), registry);
    CHECK(report.entries[0].status == StepStatus::OK);
    CHECK(report.entries[1].status == StepStatus::OK);
    CHECK(report.entries[2].status == StepStatus::FAILED);
    CHECK(report.entries[2].message ==
          "Attack 'nowhere' failed: no-session: no live session named or of kind 'ksh'");
}

TEST_CASE("spawned sessions are named by the assignment target") {
    auto child = echo_adapter("child");
    auto spawner = std::make_shared<ScriptedAdapter>(
        "bash", [child](const std::string&, const std::vector<std::string>&) {
            CommandResult r = CommandResult::success("spawned");
            r.spawns.push_back({"hint", "child", child});
            return r;
        });
    CompiledScript script;
    CompiledCommand open = attack("open", "bash", "open");
    open.assign = "myshell";
    script.execute.push_back(open);
    script.execute.push_back(attack("use", "myshell", "inside"));

    AdapterRegistry registry;
    registry.add("bash", spawner);
    ExecutionReport report = run(script, profile_with({}), registry);
    CHECK(report.entries[0].status == StepStatus::OK);
    CHECK(report.entries[1].status == StepStatus::OK);
    CHECK(report.entries[1].output == "inside");
}

TEST_CASE("spawn colliding with a live session fails the command") {
    auto spawner = std::make_shared<ScriptedAdapter>(
        "bash", [](const std::string&, const std::vector<std::string>&) {
            CommandResult r = CommandResult::success("spawned");
            r.spawns.push_back({"bash", "child", nullptr});
            return r;
        });
    CompiledScript script;
    script.execute.push_back(attack("open", "bash", "open"));
    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", spawner));
    CHECK(report.entries[0].status == StepStatus::FAILED);
    CHECK(report.entries[0].message ==
          "Attack 'open' failed: duplicate-session: 'bash' is already alive");
}

TEST_CASE("closed sessions stop receiving commands") {
    auto closer = std::make_shared<ScriptedAdapter>(
        "bash", [](const std::string& tool, const std::vector<std::string>&) {
            if (tool == "exit") {
                CommandResult r = CommandResult::success("bye");
                r.close_session = true;
                return r;
            }
            return CommandResult::success("ran " + tool);
        });
    CompiledScript script;
    script.execute.push_back(attack("quit", "bash", "exit"));
    script.execute.push_back(attack("after", "bash", "anything"));

    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", closer));
    CHECK(report.entries[0].status == StepStatus::OK);
    CHECK(report.entries[1].status == StepStatus::FAILED);
    CHECK(report.entries[1].message.find("no-session") != std::string::npos);
}

TEST_CASE("observations published by adapters become variables") {
    auto observer = std::make_shared<ScriptedAdapter>(
        "bash", [](const std::string&, const std::vector<std::string>&) {
            CommandResult r = CommandResult::success("on");
            r.observations["WIFI"] = Value::text("Android");
            return r;
        });
    CompiledScript script;
    script.execute.push_back(attack("hotspot", "bash", "hotspot"));
    script.execute.push_back(assertion("hotspot", Phase::Post, {"==", "{WIFI}", "Android"}));

    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", observer));
    CHECK(report.entries[1].status == StepStatus::OK);
}

TEST_CASE("a command that overruns its deadline fails and its effects are discarded") {
    CompiledScript script;
    CompiledCommand slow = attack("slow", "bash", "work");
    slow.timeout_ms = 50;
    slow.assign = "r";
    script.execute.push_back(slow);
    script.execute.push_back(assertion("slow", Phase::Post, {"truthy", "{r}"}));

    auto clock = make_simulated_clock();
    auto adapter = std::make_shared<ScriptedAdapter>(
        "bash", [clock](const std::string&, const std::vector<std::string>&) {
            clock->advance_ms(120);
            CommandResult r = CommandResult::success("too late");
            r.observations["LATE"] = Value::text("yes");
            return r;
        });
    ExecutionReport report = execute(script, profile_with({}),
                                     AdapterRegistry().add("bash", adapter), clock);
    CHECK(report.entries[0].status == StepStatus::FAILED);
    CHECK(report.entries[0].message ==
          "Attack 'slow' failed: timeout: exceeded 50 ms (took 120 ms)");
    CHECK(report.entries[1].status == StepStatus::FAILED); // r is absent
}

TEST_CASE("a fast command under an explicit deadline passes") {
    CompiledScript script;
    CompiledCommand quick = attack("quick", "bash", "work");
    quick.timeout_ms = 500;
    script.execute.push_back(quick);

    auto clock = make_simulated_clock();
    auto adapter = std::make_shared<ScriptedAdapter>(
        "bash", [clock](const std::string&, const std::vector<std::string>&) {
            clock->advance_ms(100);
            return CommandResult::success("done");
        });
    ExecutionReport report = execute(script, profile_with({}),
                                     AdapterRegistry().add("bash", adapter), clock);
    CHECK(report.entries[0].status == StepStatus::OK);
}

TEST_CASE("adapter exceptions surface as failed entries, not aborts") {
    auto thrower = std::make_shared<ScriptedAdapter>(
        "bash", [](const std::string&, const std::vector<std::string>&) -> CommandResult {
            throw std::runtime_error("segfault adjacent");
        });
    CompiledScript script;
    script.execute.push_back(attack("a", "bash", "tool"));
    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", thrower));
    CHECK(report.entries[0].status == StepStatus::FAILED);
    CHECK(report.entries[0].message == "Attack 'a' failed: adapter fault: segfault adjacent");
}

TEST_CASE("if takes the then branch on a true condition") {
    CompiledScript script;
    CompiledCommand branch;
    branch.label = "b";
    branch.environment = "axe";
    branch.tool = "if";
    branch.parameters = {"==", "1", "1"};
    branch.body.push_back(attack("t", "bash", "then_tool"));
    branch.else_body.push_back(attack("e", "bash", "else_tool"));
    script.execute.push_back(branch);

    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", echo_adapter()));
    REQUIRE(report.entries.size() == 2);
    CHECK(report.entries[0].message == "If 'b' took the then branch");
    CHECK(report.entries[1].output == "then_tool");
}

TEST_CASE("if takes the else branch on a false condition") {
    CompiledScript script;
    CompiledCommand branch;
    branch.label = "b";
    branch.environment = "axe";
    branch.tool = "if";
    branch.parameters = {"==", "1", "2"};
    branch.body.push_back(attack("t", "bash", "then_tool"));
    branch.else_body.push_back(attack("e", "bash", "else_tool"));
    script.execute.push_back(branch);

    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", echo_adapter()));
    REQUIRE(report.entries.size() == 2);
    CHECK(report.entries[0].message == "If 'b' took the else branch");
    CHECK(report.entries[1].output == "else_tool");
}

TEST_CASE("while loops until the condition turns false") {
    // count: increments and returns the new value; loop while {n} < 3.
    auto clock = make_simulated_clock();
    auto counter = std::make_shared<ScriptedAdapter>(
        "bash", [n = std::make_shared<std::int64_t>(0)](const std::string&,
                                                        const std::vector<std::string>&) {
            CommandResult r = CommandResult::success(std::to_string(++*n));
            r.value = Value::integer(*n);
            return r;
        });
    CompiledScript script;
    CompiledCommand seed = attack("seed", "bash", "count");
    seed.assign = "n";
    script.execute.push_back(seed);

    CompiledCommand loop;
    loop.label = "loop";
    loop.environment = "axe";
    loop.tool = "while";
    loop.parameters = {"<", "{n}", "3"};
    CompiledCommand body = attack("bump", "bash", "count");
    body.assign = "n";
    loop.body.push_back(body);
    script.execute.push_back(loop);

    ExecutionReport report = execute(script, profile_with({}),
                                     AdapterRegistry().add("bash", counter), clock);
    // seed (n=1), bump (n=2), bump (n=3), loop summary.
    REQUIRE(report.entries.size() == 4);
    CHECK(report.entries[3].message == "While 'loop' completed after 2 iterations");
    CHECK_FALSE(report.any_failed());
}

TEST_CASE("runaway loops hit the cap and fail") {
    CompiledScript script;
    CompiledCommand loop;
    loop.label = "forever";
    loop.environment = "axe";
    loop.tool = "while";
    loop.parameters = {"==", "1", "1"};
    loop.body.push_back(attack("spin", "bash", "true"));
    script.execute.push_back(loop);

    ExecutorOptions options;
    options.loop_cap = 5;
    ExecutionReport report = run(script, profile_with({}),
                                 AdapterRegistry().add("bash", echo_adapter()), options);
    REQUIRE(report.entries.size() == 6); // 5 body runs + the loop failure
    CHECK(report.entries[5].status == StepStatus::FAILED);
    CHECK(report.entries[5].message == "While 'forever' hit the loop-cap after 5 iterations");
}

TEST_CASE("a skipped attack inside a loop leaves prior state untouched") {
    // The body's pre gate fails after the first pass, so the attack is
    // skipped and {n} stops advancing; the loop then runs into the cap.
    auto counter = std::make_shared<ScriptedAdapter>(
        "bash", [n = std::make_shared<std::int64_t>(0)](const std::string&,
                                                        const std::vector<std::string>&) {
            CommandResult r = CommandResult::success(std::to_string(++*n));
            r.value = Value::integer(*n);
            return r;
        });
    CompiledScript script;
    CompiledCommand seed = attack("seed", "bash", "count");
    seed.assign = "n";
    script.execute.push_back(seed);

    CompiledCommand loop;
    loop.label = "loop";
    loop.environment = "axe";
    loop.tool = "while";
    loop.parameters = {"<", "{n}", "3"};
    loop.body.push_back(assertion("step", Phase::Pre, {"<", "{n}", "2"}));
    CompiledCommand body = attack("step", "bash", "count");
    body.assign = "n";
    loop.body.push_back(body);
    script.execute.push_back(loop);

    ExecutorOptions options;
    options.loop_cap = 4;
    ExecutionReport report = run(script, profile_with({}),
                                 AdapterRegistry().add("bash", counter), options);
    // seed -> n=1; pass 1: pre ok (1<2), n=2; pass 2: pre fails (2<2), attack
    // skipped, n stays 2 so 2<3 keeps looping until the cap trips.
    REQUIRE_FALSE(report.entries.empty());
    const ReportEntry& last = report.entries.back();
    CHECK(last.status == StepStatus::FAILED);
    CHECK(last.message == "While 'loop' hit the loop-cap after 4 iterations");
    std::size_t skipped = 0;
    for (const ReportEntry& entry : report.entries)
        if (entry.status == StepStatus::SKIPPED)
            ++skipped;
    CHECK(skipped == 3); // passes 2-4 skip the gated attack
}

TEST_CASE("malformed control condition fails without running the body") {
    CompiledScript script;
    CompiledCommand branch;
    branch.label = "b";
    branch.environment = "axe";
    branch.tool = "if";
    branch.parameters = {"=="}; // missing operands
    branch.body.push_back(attack("t", "bash", "tool"));
    script.execute.push_back(branch);

    ExecutionReport report =
        run(script, profile_with({}), AdapterRegistry().add("bash", echo_adapter()));
    REQUIRE(report.entries.size() == 1);
    CHECK(report.entries[0].status == StepStatus::FAILED);
    CHECK(report.entries[0].message.find("condition invalid") != std::string::npos);
}

TEST_CASE("oracle assertions consult the oracle function") {
    OracleFn oracle = [](const std::string& name, const std::vector<Value>& args)
        -> std::optional<bool> {
        if (name != "CAN_MESSAGE")
            return std::nullopt;
        return !args.empty() && args[0].to_text() == "201#32C800006464C800";
    };
    CompiledScript script;
    script.execute.push_back(
        assertion("a", Phase::Post, {"oracle", "CAN_MESSAGE", "{MSG_SPD}"}));

    SutProfile profile;
    profile.id = "p";
    profile.messages["MSG_SPD"] = "201#32C800006464C800";
    ExecutionReport ok_report =
        execute(script, profile, AdapterRegistry(), make_simulated_clock(), oracle);
    CHECK(ok_report.entries[0].status == StepStatus::OK);

    profile.messages["MSG_SPD"] = "200#CAFE123456";
    ExecutionReport bad_report =
        execute(script, profile, AdapterRegistry(), make_simulated_clock(), oracle);
    CHECK(bad_report.entries[0].status == StepStatus::FAILED);
}

TEST_CASE("no-abort property: every schema-valid script yields a full report") {
    auto failer = std::make_shared<ScriptedAdapter>(
        "bash", [](const std::string&, const std::vector<std::string>&) {
            return CommandResult::failure("always fails");
        });
    auto thrower = std::make_shared<ScriptedAdapter>(
        "adb", [](const std::string&, const std::vector<std::string>&) -> CommandResult {
            throw std::runtime_error("adapter bug");
        });
    gen::Rng rng(0xF00D);
    SutProfile profile = profile_with({});
    for (int i = 0; i < 1000; ++i) {
        CompiledScript script = gen::compiled_script(rng);
        AdapterRegistry registry;
        registry.add("bash", failer).add("adb", thrower);
        ExecutionReport report = execute(script, profile, registry, make_simulated_clock());
        REQUIRE(report.entries.size() == script.execute.size());
        for (std::size_t s = 0; s < report.entries.size(); ++s)
            REQUIRE(report.entries[s].seq == static_cast<std::int64_t>(s) + 1);
    }
}
