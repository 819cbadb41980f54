// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include <alia/knowledge_base.hpp>

using namespace alia;

namespace {
const std::filesystem::path kCorpus = ALIA_CORPUS_DIR;
}

TEST_CASE("profile loads with all three sections") {
    SutProfile p = load_profile(R"({
        "id": "demo",
        "variables": {"ip_addr": "192.168.1.1"},
        "messages": {"MSG_SPD": "123#ABCD000000"},
        "scripts": {"CarCanAttackScript": "demo.json"}
    })");
    CHECK(p.id == "demo");
    CHECK(p.variables.at("ip_addr") == "192.168.1.1");
    CHECK(p.contains("MSG_SPD"));
    CHECK(p.contains("CarCanAttackScript"));
    CHECK_FALSE(p.contains("nope"));
}

TEST_CASE("resolution order is variables, messages, scripts") {
    SutProfile p;
    p.id = "x";
    p.variables["a"] = "var";
    p.messages["m"] = "123#";
    p.scripts["s"] = "file.json";
    CHECK(resolve(p, "a") == Value::text("var"));
    CHECK(resolve(p, "m") == Value::text("123#"));
    CHECK(resolve(p, "s") == Value::text("file.json"));
    CHECK_FALSE(resolve(p, "missing"));
}

TEST_CASE("message values must be valid frames") {
    try {
        load_profile(R"({"id": "x", "messages": {"MSG": "not-a-frame"}})");
        FAIL("expected bad-frame");
    } catch (const Error& e) {
        CHECK(e.code() == "bad-frame");
    }
}

TEST_CASE("variable and message names must not collide") {
    try {
        load_profile(R"({"id": "x", "variables": {"M": "v"}, "messages": {"M": "123#"}})");
        FAIL("expected malformed-profile");
    } catch (const Error& e) {
        CHECK(e.code() == "malformed-profile");
    }
}

TEST_CASE("malformed documents are rejected") {
    CHECK_THROWS_AS(load_profile("not json"), Error);
    CHECK_THROWS_AS(load_profile("[]"), Error);
    CHECK_THROWS_AS(load_profile("{}"), Error); // no id
    CHECK_THROWS_AS(load_profile(R"({"id": ""})"), Error);
    CHECK_THROWS_AS(load_profile(R"({"id": "x", "variables": {"a": 1}})"), Error);
    CHECK_THROWS_AS(load_profile(R"({"id": "x", "variables": []})"), Error);
}

TEST_CASE("serialization round-trips") {
    SutProfile p = load_profile(R"({
        "id": "demo",
        "variables": {"ip_addr": "192.168.1.1"},
        "messages": {"MSG_SPD": "123#ABCD000000"}
    })");
    SutProfile again = load_profile(serialize(p));
    CHECK(again == p);
}

TEST_CASE("store loads every corpus profile by id") {
    ProfileStore store = ProfileStore::load_dir(kCorpus / "profiles");
    REQUIRE(store.find("mazda3-2012"));
    REQUIRE(store.find("sut-b"));
    REQUIRE(store.find("profile-a"));
    REQUIRE(store.find("empty"));
    CHECK(store.find("mazda3-2012")->messages.at("MSG_SPD") == "201#32C800006464C800");
    CHECK(store.find("sut-b")->messages.at("MSG_SPD") == "200#CAFE123456");
    CHECK(store.find("profile-a")->messages.at("MSG_SPD") == "123#ABCD000000");
    CHECK(store.find("no-such") == nullptr);
}

TEST_CASE("duplicate profile ids in one directory are rejected") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "alia_dup_profiles";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "one.sut.json") << R"({"id": "same"})";
    std::ofstream(dir / "two.sut.json") << R"({"id": "same"})";
    CHECK_THROWS_AS(ProfileStore::load_dir(dir), Error);
    fs::remove_all(dir);
}

TEST_CASE("two profiles give the same symbol different concrete values") {
    ProfileStore store = ProfileStore::load_dir(kCorpus / "profiles");
    Value a = *resolve(*store.find("mazda3-2012"), "MSG_SPD");
    Value b = *resolve(*store.find("sut-b"), "MSG_SPD");
    CHECK(a == Value::text("201#32C800006464C800"));
    CHECK(b == Value::text("200#CAFE123456"));
    CHECK(a != b);
}
