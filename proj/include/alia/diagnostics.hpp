// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

namespace alia {

/// 1-based position of a token or construct in source text. Attached to AST
/// nodes and diagnostics; ignored by structural equality.
struct SourceSpan {
    int line = 0;
    int column_start = 0;
    int column_end = 0;

    bool valid() const { return line > 0 && column_start > 0 && column_start <= column_end; }
};

enum class Severity { Error, Warning, Note };

inline const char* to_string(Severity s) {
    switch (s) {
    case Severity::Error: return "ERROR";
    case Severity::Warning: return "WARNING";
    case Severity::Note: return "NOTE";
    }
    return "?";
}

// Errors block compilation; warnings and notes do not.
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    SourceSpan span;

    /// CLI line format: `SEVERITY code file:line:col message`.
    std::string format(const std::string& file) const {
        return std::string(to_string(severity)) + " " + code + " " + file + ":" +
               std::to_string(span.line) + ":" + std::to_string(span.column_start) + " " +
               message;
    }

    nlohmann::json to_json() const {
        return {{"severity", severity == Severity::Error     ? "error"
                             : severity == Severity::Warning ? "warning"
                                                             : "note"},
                {"code", code},
                {"message", message},
                {"line", span.line},
                {"column_start", span.column_start},
                {"column_end", span.column_end}};
    }
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

/// Stable source-order sort: by line, then column, then code.
inline void sort_diagnostics(std::vector<Diagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.span.line != b.span.line)
            return a.span.line < b.span.line;
        if (a.span.column_start != b.span.column_start)
            return a.span.column_start < b.span.column_start;
        return a.code < b.code;
    });
}

} // namespace alia
