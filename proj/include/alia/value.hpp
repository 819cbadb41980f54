// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace alia {

/// Dynamically typed runtime value. `Absent` is a first-class state: it is
/// what a variable holds before any assignment and after a failed action, so
/// conditions over unset variables evaluate (to false) instead of throwing.
class Value {
public:
    enum class Kind { Absent, Boolean, Integer, Text, Structured };

    using Fields = std::map<std::string, Value>;

    Value() : data_(Absent{}) {}

    static Value absent() { return Value(); }
    static Value boolean(bool b) { return Value(Data(b)); }
    static Value integer(std::int64_t i) { return Value(Data(i)); }
    static Value text(std::string s) { return Value(Data(std::move(s))); }
    static Value structured(Fields f = {}) { return Value(Data(std::move(f))); }

    Kind kind() const { return static_cast<Kind>(data_.index()); }

    bool is_absent() const { return kind() == Kind::Absent; }
    bool is_structured() const { return kind() == Kind::Structured; }

    bool as_boolean() const { return std::get<bool>(data_); }
    std::int64_t as_integer() const { return std::get<std::int64_t>(data_); }
    const std::string& as_text() const { return std::get<std::string>(data_); }
    const Fields& fields() const { return std::get<Fields>(data_); }

    /// Truthiness: Absent and false are falsy; empty text is falsy; zero is
    /// falsy; structured values are always truthy.
    bool truthy() const {
        switch (kind()) {
        case Kind::Absent: return false;
        case Kind::Boolean: return as_boolean();
        case Kind::Integer: return as_integer() != 0;
        case Kind::Text: return !as_text().empty();
        case Kind::Structured: return true;
        }
        return false;
    }

    /// Canonical text form, used for parameter substitution and mixed-type
    /// comparison. Structured values render as compact JSON with sorted keys.
    std::string to_text() const {
        switch (kind()) {
        case Kind::Absent: return "";
        case Kind::Boolean: return as_boolean() ? "true" : "false";
        case Kind::Integer: return std::to_string(as_integer());
        case Kind::Text: return as_text();
        case Kind::Structured: return to_json().dump();
        }
        return "";
    }

    nlohmann::json to_json() const {
        switch (kind()) {
        case Kind::Absent: return nullptr;
        case Kind::Boolean: return as_boolean();
        case Kind::Integer: return as_integer();
        case Kind::Text: return as_text();
        case Kind::Structured: {
            nlohmann::json obj = nlohmann::json::object();
            for (const auto& [k, v] : fields())
                obj[k] = v.to_json();
            return obj;
        }
        }
        return nullptr;
    }

    /// Reads a dotted path. Missing fields and non-structured intermediate
    /// values read as Absent; an empty path reads the value itself.
    Value read_path(std::span<const std::string> path) const {
        if (path.empty())
            return *this;
        if (!is_structured())
            return absent();
        auto it = fields().find(path.front());
        if (it == fields().end())
            return absent();
        return it->second.read_path(path.subspan(1));
    }

    /// Writes `leaf` at a dotted path and returns the updated value. Writing
    /// a field into a non-structured value promotes it to Structured and
    /// discards the previous content; `promoted`, when given, reports that.
    Value write_path(std::span<const std::string> path, Value leaf,
                     bool* promoted = nullptr) const {
        if (path.empty())
            return leaf;
        Fields out;
        if (is_structured()) {
            out = fields();
        } else if (promoted && !is_absent()) {
            *promoted = true;
        }
        auto [it, inserted] = out.try_emplace(path.front(), Value());
        it->second = it->second.write_path(path.subspan(1), std::move(leaf), promoted);
        return structured(std::move(out));
    }

    friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

private:
    struct Absent {
        friend bool operator==(Absent, Absent) { return true; }
    };
    using Data = std::variant<Absent, bool, std::int64_t, std::string, Fields>;

    explicit Value(Data d) : data_(std::move(d)) {}

    Data data_;
};

/// Splits "a.b.c" into segments. No validation; empty input gives {}.
inline std::vector<std::string> split_path(const std::string& dotted) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= dotted.size()) {
        std::size_t dot = dotted.find('.', start);
        if (dot == std::string::npos) {
            if (start < dotted.size())
                out.push_back(dotted.substr(start));
            break;
        }
        out.push_back(dotted.substr(start, dot - start));
        start = dot + 1;
    }
    return out;
}

inline std::string join_path(std::span<const std::string> path) {
    std::string out;
    for (const auto& seg : path) {
        if (!out.empty())
            out += '.';
        out += seg;
    }
    return out;
}

} // namespace alia
