// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Golden tests over the corpus: compiled forms, diagnostics, and execution
// reports are pinned byte-for-byte. Regenerate with ALIA_UPDATE_GOLDENS=1
// after reviewing the diff.

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <alia/alia.hpp>

using namespace alia;

namespace {

std::filesystem::path corpus_root() { return std::filesystem::path(ALIA_CORPUS_DIR); }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool update_goldens() {
    const char* value = std::getenv("ALIA_UPDATE_GOLDENS");
    return value && *value && std::string(value) != "0";
}

void check_golden(const std::string& name, const std::string& actual) {
    std::filesystem::path golden = corpus_root() / "golden" / name;
    if (update_goldens()) {
        std::filesystem::create_directories(golden.parent_path());
        std::ofstream out(golden);
        out << actual;
        SUCCEED("regenerated " << golden.string());
        return;
    }
    INFO("golden file: " << golden.string() << " (set ALIA_UPDATE_GOLDENS=1 to regenerate)");
    REQUIRE(std::filesystem::exists(golden));
    CHECK(actual == read_file(golden));
}

AttackDescription parse_script(const std::string& stem) {
    std::string source = read_file(corpus_root() / "scripts" / (stem + ".alia"));
    auto [ast, diagnostics] = parse(source);
    REQUIRE_FALSE(has_errors(diagnostics));
    return std::move(ast);
}

SutProfile corpus_profile(const std::string& stem) {
    return load_profile_file(corpus_root() / "profiles" / (stem + ".sut.json"));
}

ExecutionReport run_compiled(const CompiledScript& script, const SutProfile& profile) {
    sim::SimConfig config;
    config.payload_root = corpus_root() / "payloads";
    sim::Simulator simulator(config);
    return execute(script, profile, simulator.registry(), simulator.clock(),
                   simulator.oracle());
}

} // namespace

TEST_CASE("every corpus script parses cleanly and is print-stable") {
    std::size_t seen = 0;
    for (const auto& entry :
         std::filesystem::directory_iterator(corpus_root() / "scripts")) {
        if (entry.path().extension() != ".alia")
            continue;
        ++seen;
        INFO("script: " << entry.path().string());
        std::string source = read_file(entry.path());
        auto [first, first_diags] = parse(source);
        REQUIRE_FALSE(has_errors(first_diags));

        std::string printed = pretty_print(first);
        auto [second, second_diags] = parse(printed);
        REQUIRE_FALSE(has_errors(second_diags));
        CHECK(first == second);
        CHECK(pretty_print(second) == printed);
    }
    CHECK(seen >= 4);
}

TEST_CASE("every corpus profile loads and resolves its own symbols") {
    ProfileStore store = ProfileStore::load_dir(corpus_root() / "profiles");
    CHECK(store.all().size() >= 4);
    for (const auto& [id, profile] : store.all()) {
        for (const auto& [name, value] : profile.variables)
            CHECK(resolve(profile, name) == Value::text(value));
        for (const auto& [name, value] : profile.messages)
            CHECK(resolve(profile, name) == Value::text(value));
    }
}

TEST_CASE("corpus scripts check clean against their paired profiles") {
    CHECK(check(parse_script("listing4"), corpus_profile("mazda3-2012")).empty());
    CHECK(check(parse_script("listing4"), corpus_profile("sut-b")).empty());
    CHECK(check(parse_script("fig1"), corpus_profile("empty")).empty());
    CHECK(check(parse_script("empty"), corpus_profile("empty")).empty());
}

TEST_CASE("golden: compiled corpus scripts") {
    check_golden("listing1.compiled.json", serialize(compile(parse_script("listing1"))));
    check_golden("listing4.compiled.json", serialize(compile(parse_script("listing4"))));
    check_golden("fig1.compiled.json", serialize(compile(parse_script("fig1"))));
}

TEST_CASE("golden: diagnostics for the misspelled-variable script") {
    std::string source = read_file(corpus_root() / "scripts" / "listing1.alia");
    auto [ast, parse_diags] = parse(source);
    REQUIRE_FALSE(has_errors(parse_diags));

    std::vector<Diagnostic> diags = check(ast, corpus_profile("empty"));
    sort_diagnostics(diags);
    std::string rendered;
    for (const Diagnostic& d : diags)
        rendered += d.format("listing1.alia") + "\n";
    check_golden("listing1.diagnostics.txt", rendered);
}

TEST_CASE("golden: four-action scenario report") {
    CompiledScript script = compile(parse_script("fig1"));
    ExecutionReport report = run_compiled(script, corpus_profile("empty"));
    check_golden("fig1.report.json", serialize(report));

    // The canonical semantics table, pinned independently of the golden file
    // so a bad regeneration cannot slip through.
    using S = StepStatus;
    CHECK(report.status_sequence() ==
          std::vector<S>{S::OK, S::FAILED, S::FAILED, S::OK, S::OK, S::FAILED, S::FAILED,
                         S::SKIPPED, S::SKIPPED, S::OK, S::OK, S::OK});
}

TEST_CASE("golden: can-bus attack reports for two targets") {
    CompiledScript script = compile(parse_script("listing4"));

    ExecutionReport mazda = run_compiled(script, corpus_profile("mazda3-2012"));
    check_golden("listing4.mazda3-2012.report.json", serialize(mazda));
    CHECK_FALSE(mazda.any_failed());

    ExecutionReport other = run_compiled(script, corpus_profile("sut-b"));
    check_golden("listing4.sut-b.report.json", serialize(other));

    // Same compiled artifact, different knowledge base: identical statuses.
    CHECK(mazda.status_sequence() == other.status_sequence());
}
