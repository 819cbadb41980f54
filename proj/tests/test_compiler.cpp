// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <string>
#include <vector>

#include <alia/compiler.hpp>
#include <alia/parser.hpp>

#include "generators.hpp"

using namespace alia;

namespace {

AttackDescription parse_ok(const std::string& src) {
    auto [ast, diags] = parse(src);
    REQUIRE_FALSE(has_errors(diags));
    return ast;
}

const char* kListing1 = R"(PreConditions:
  get_su_rights: con
Actions:
  get_con: con = exploit(type:OpenADB, target: ip_addr)
  get_su_rights: exploit(type:ScriptExecution, command:'su')
  exe_whoami: user = exploit(type:ScriptExecution, command:'whoami')
  list: exploit(type:ScriptExecution, command:'ls')
PostConditions:
  exe_whoami: uesr == "root"
)";

} // namespace

TEST_CASE("empty description compiles to an empty execute array") {
    CompiledScript script = compile(parse_ok("PreConditions:\nActions:\nPostConditions:\n"));
    CHECK(script.execute.empty());
    CHECK(serialize(script) == "{\"execute\":[]}\n");
}

TEST_CASE("reference script compiles to the documented command sequence") {
    CompiledScript script = compile(parse_ok(kListing1));
    REQUIRE(script.execute.size() == 6);

    const CompiledCommand& first = script.execute[0];
    CHECK(first.environment == "bash");
    CHECK(first.tool == "adb");
    CHECK(first.parameters == std::vector<std::string>{"connect", "{ip_addr}"});
    CHECK(first.phase == Phase::Attack);
    CHECK(first.label == "get_con");
    REQUIRE(first.assign);
    CHECK(*first.assign == "con");

    const CompiledCommand& pre = script.execute[1];
    CHECK(pre.environment == "axe");
    CHECK(pre.tool == "assert");
    CHECK(pre.phase == Phase::Pre);
    CHECK(pre.label == "get_su_rights");
    CHECK(pre.parameters == std::vector<std::string>{"truthy", "{con}"});

    CHECK(script.execute[2].tool == "su");
    CHECK(script.execute[2].environment == "adb");
    CHECK(script.execute[3].tool == "whoami");
    CHECK(script.execute[3].assign.value() == "user");

    const CompiledCommand& post = script.execute[4];
    CHECK(post.phase == Phase::Post);
    CHECK(post.parameters == std::vector<std::string>{"==", "{uesr}", "root"});

    CHECK(script.execute[5].tool == "ls");
}

TEST_CASE("multi-word literal tool splits into tool plus leading parameters") {
    CompiledScript script = compile(parse_ok(
        "PreConditions:\nActions:\n  a: exploit(type:ShellCommand, command:'echo done')\nPostConditions:\n"));
    REQUIRE(script.execute.size() == 1);
    CHECK(script.execute[0].tool == "echo");
    CHECK(script.execute[0].parameters == std::vector<std::string>{"done"});
}

TEST_CASE("variable references in environment position become bare session names") {
    CompiledScript script = compile(parse_ok(R"(PreConditions:
Actions:
  a: shell = exploit(type:BlueBorne, target:tgt)
  b: exploit(type:InstallPythonLib, target:tgt, shell:shell)
PostConditions:
)"));
    REQUIRE(script.execute.size() == 2);
    CHECK(script.execute[1].environment == "shell"); // no braces: session routing
    CHECK(script.execute[0].parameters == std::vector<std::string>{"{tgt}"});
}

TEST_CASE("variant selection by argument names") {
    CompiledScript one = compile(parse_ok(
        "PreConditions:\nActions:\n  a: exploit(type:CanSend, frame:MSG_SPD)\nPostConditions:\n"));
    REQUIRE(one.execute.size() == 1);
    CHECK(one.execute[0].parameters == std::vector<std::string>{"{MSG_SPD}"});

    CompiledScript cyclic = compile(parse_ok(
        "PreConditions:\nActions:\n  a: exploit(type:CanSend, frame:MSG_SPD, period_ms:'100', "
        "count:'50')\nPostConditions:\n"));
    REQUIRE(cyclic.execute.size() == 1);
    CHECK(cyclic.execute[0].parameters ==
          std::vector<std::string>{"{MSG_SPD}", "--period-ms", "100", "--count", "50"});
}

TEST_CASE("unknown function type fails with unknown-function") {
    try {
        compile(parse_ok("PreConditions:\nActions:\n  a: exploit(type:NoSuch)\nPostConditions:\n"));
        FAIL("expected unknown-function");
    } catch (const Error& e) {
        CHECK(e.code() == "unknown-function");
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
}

TEST_CASE("argument set mismatch fails with template-arity") {
    try {
        compile(parse_ok(
            "PreConditions:\nActions:\n  a: exploit(type:OpenADB, nonsense:x)\nPostConditions:\n"));
        FAIL("expected template-arity");
    } catch (const Error& e) {
        CHECK(e.code() == "template-arity");
    }
}

TEST_CASE("control flow compiles to nested bodies with inner conditions") {
    CompiledScript script = compile(parse_ok(R"(PreConditions:
  inner: 1 == 1
Actions:
  loop: while (tries < 3) {
    inner: r = exploit(type:ShellCommand, command:'true')
  }
PostConditions:
  inner: r
)"));
    REQUIRE(script.execute.size() == 1);
    const CompiledCommand& loop = script.execute[0];
    CHECK(loop.environment == "axe");
    CHECK(loop.tool == "while");
    CHECK(loop.is_control());
    CHECK(loop.parameters == std::vector<std::string>{"<", "{tries}", "3"});
    // Inner step keeps its pre/post wrapping inside the body.
    REQUIRE(loop.body.size() == 3);
    CHECK(loop.body[0].phase == Phase::Pre);
    CHECK(loop.body[1].phase == Phase::Attack);
    CHECK(loop.body[1].tool == "true");
    CHECK(loop.body[2].phase == Phase::Post);
}

TEST_CASE("if compiles then and else branches") {
    CompiledScript script = compile(parse_ok(R"(PreConditions:
Actions:
  branch: if (x == 1) {
    t: exploit(type:ShellCommand, command:'true')
  } else {
    f: exploit(type:ShellCommand, command:'false')
  }
PostConditions:
)"));
    REQUIRE(script.execute.size() == 1);
    const CompiledCommand& branch = script.execute[0];
    CHECK(branch.tool == "if");
    REQUIRE(branch.body.size() == 1);
    REQUIRE(branch.else_body.size() == 1);
    CHECK(branch.body[0].tool == "true");
    CHECK(branch.else_body[0].tool == "false");
}

TEST_CASE("assertion serialization escapes colliding literals") {
    auto serialize_post = [](const std::string& expr_src) {
        AttackDescription ast = parse_ok("PreConditions:\nActions:\n  a: exploit(type:X)\nPostConditions:\n  a: " +
                                         expr_src + "\n");
        return serialize_condition(ast.postconditions[0].expr);
    };
    CHECK(serialize_post("x == \"==\"") == std::vector<std::string>{"==", "{x}", ":=="});
    CHECK(serialize_post("x == \"12\"") == std::vector<std::string>{"==", "{x}", ":12"});
    CHECK(serialize_post("x == \"{y}\"") == std::vector<std::string>{"==", "{x}", ":{y}"});
    CHECK(serialize_post("x == \":z\"") == std::vector<std::string>{"==", "{x}", "::z"});
    CHECK(serialize_post("x == \"plain\"") == std::vector<std::string>{"==", "{x}", "plain"});
    CHECK(serialize_post("x") == std::vector<std::string>{"truthy", "{x}"});
    CHECK(serialize_post("not x") == std::vector<std::string>{"not", "{x}"});
    CHECK(serialize_post("x.f == 1") == std::vector<std::string>{"==", "{x.f}", "1"});
    CHECK(serialize_post("Oracle.CAN_MESSAGE(MSG_SPD)") ==
          std::vector<std::string>{"oracle", "CAN_MESSAGE", "{MSG_SPD}"});
}

TEST_CASE("compiled scripts serialize and reparse unchanged") {
    gen::Rng rng(0xC0DE);
    for (int i = 0; i < 200; ++i) {
        CompiledScript script = gen::compiled_script(rng);
        CompiledScript again = parse_compiled_script(serialize(script));
        REQUIRE(again == script);
    }
}

TEST_CASE("compiled listing scripts reparse unchanged") {
    CompiledScript script = compile(parse_ok(kListing1));
    CHECK(parse_compiled_script(serialize(script, true)) == script);
}

TEST_CASE("schema validation rejects malformed documents") {
    auto rejects = [](const std::string& text) {
        try {
            parse_compiled_script(text);
            return false;
        } catch (const Error& e) {
            return e.code() == std::string("invalid-script");
        }
    };
    CHECK(rejects("not json"));
    CHECK(rejects("[]"));
    CHECK(rejects("{}"));                                     // no execute
    CHECK(rejects(R"({"execute": {}})"));                     // not an array
    CHECK(rejects(R"({"execute": [], "extra": 1})"));         // unknown top key
    CHECK(rejects(R"({"execute": [{}]})"));                   // command lacks keys
    CHECK(rejects(R"({"execute": [{"environment":"bash","tool":"x","parameters":[1]}]})"));
    CHECK(rejects(R"({"execute": [{"environment":"bash","tool":"x","parameters":[],"bogus":1}]})"));
    CHECK(rejects(R"({"execute": [{"environment":"bash","tool":"x","parameters":[],"phase":"nope"}]})"));
    CHECK(rejects(R"({"execute": [{"environment":"bash","tool":"x","parameters":[],"timeout_ms":0}]})"));
    CHECK(rejects(R"({"execute": [{"environment":"bash","tool":"x","parameters":[],"body":[]}]})"));
    CHECK(rejects(
        R"({"execute": [{"environment":"axe","tool":"while","parameters":[],"body":[],"else":[]}]})"));
    // Valid minimal command and valid control command still pass.
    CHECK_FALSE(rejects(R"({"execute": [{"environment":"bash","tool":"x","parameters":[]}]})"));
    CHECK_FALSE(rejects(
        R"({"execute": [{"environment":"axe","tool":"if","parameters":[],"body":[],"else":[]}]})"));
}

TEST_CASE("file catalog behaves like the embedded catalog") {
    ToolMapping from_file = load_tool_mapping(
        nlohmann::json(to_json(default_tool_mapping())).dump());
    AttackDescription ast = parse_ok(kListing1);
    CHECK(compile(ast, from_file) == compile(ast));
}
