// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// The assertion wire format shared by compiler and engine: a condition
// expression serializes to a prefix token list (operator first, then its
// operands), e.g. `uesr == "root"` → ["==","{uesr}","root"] and a bare
// variable → ["truthy","{con}"]. Value tokens are `{name}` placeholders,
// integer literals, or plain text; a leading ':' escapes text that would
// otherwise read as an operator, placeholder, or number, and the evaluator
// strips it. `oracle` consumes its name plus all remaining tokens as plain
// values, so oracle arguments cannot themselves be operator expressions —
// a deliberate format limitation.

#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alia/ast.hpp"
#include "alia/value.hpp"

namespace alia {

inline bool is_assert_operator(const std::string& token) {
    static const std::set<std::string> ops = {"==",  "!=", "<",   "<=",     ">",      ">=",
                                              "+",   "-",  "*",   "/",      "and",    "or",
                                              "not", "truthy", "oracle"};
    return ops.count(token) != 0;
}

/// True for tokens the evaluator would read back as an Integer.
inline bool is_integer_token(const std::string& token) {
    std::size_t start = token.size() > 1 && token[0] == '-' ? 1 : 0;
    if (token.size() == start)
        return false;
    for (std::size_t i = start; i < token.size(); ++i)
        if (token[i] < '0' || token[i] > '9')
            return false;
    return true;
}

/// Escapes literal text whose spelling collides with another token class.
inline std::string escape_assert_literal(const std::string& text) {
    if (!text.empty() && (text[0] == ':' || text[0] == '{'))
        return ":" + text;
    if (is_assert_operator(text) || is_integer_token(text))
        return ":" + text;
    return text;
}

namespace detail {

inline const char* assert_symbol(BinaryOp op) {
    switch (op) {
    case BinaryOp::Or: return "or";
    case BinaryOp::And: return "and";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    }
    return "==";
}

inline std::string dotted_path_of(const Expr& e) {
    if (e.kind == Expr::Kind::VarRef)
        return e.text;
    // FieldAccess chain; the parser guarantees a VarRef at the root.
    return dotted_path_of(*e.lhs) + "." + e.text;
}

inline void serialize_expr(const Expr& e, std::vector<std::string>& out) {
    switch (e.kind) {
    case Expr::Kind::StringLit:
        out.push_back(escape_assert_literal(e.text));
        return;
    case Expr::Kind::IntLit:
        out.push_back(std::to_string(e.int_value));
        return;
    case Expr::Kind::VarRef:
    case Expr::Kind::FieldAccess:
        out.push_back("{" + dotted_path_of(e) + "}");
        return;
    case Expr::Kind::Not:
        out.push_back("not");
        serialize_expr(*e.lhs, out);
        return;
    case Expr::Kind::Binary:
        out.push_back(assert_symbol(e.op));
        serialize_expr(*e.lhs, out);
        serialize_expr(*e.rhs, out);
        return;
    case Expr::Kind::OracleCall:
        out.push_back("oracle");
        out.push_back(e.text);
        for (const ExprPtr& arg : e.args)
            serialize_expr(*arg, out);
        return;
    }
}

} // namespace detail

/// Prefix serialization of a condition expression. A bare value becomes an
/// explicit truthiness check so the intent survives in the compiled script.
inline std::vector<std::string> serialize_condition(const ExprPtr& expr) {
    std::vector<std::string> out;
    if (!expr)
        return out;
    switch (expr->kind) {
    case Expr::Kind::StringLit:
    case Expr::Kind::IntLit:
    case Expr::Kind::VarRef:
    case Expr::Kind::FieldAccess:
        out.push_back("truthy");
        break;
    default:
        break;
    }
    detail::serialize_expr(*expr, out);
    return out;
}

/// Resolves a dotted placeholder name to a Value; Absent means unresolvable.
using VarResolver = std::function<Value(const std::string& dotted_name)>;

/// Runs a named oracle over already-resolved argument values; nullopt means
/// the oracle is not registered.
using OracleFn =
    std::function<std::optional<bool>(const std::string& name, const std::vector<Value>& args)>;

struct AssertResult {
    bool ok = false;
    std::string detail;    // human diagnostic when not ok
    bool malformed = false; // serialization itself was invalid
};

namespace detail {

class AssertEvaluator {
public:
    AssertEvaluator(const std::vector<std::string>& tokens, const VarResolver& resolver,
                    const OracleFn& oracle)
        : tokens_(tokens), resolver_(resolver), oracle_(oracle) {}

    AssertResult run() {
        if (tokens_.empty())
            return malformed("empty assertion");
        Value value = eval();
        if (failed_)
            return malformed(error_);
        if (pos_ != tokens_.size())
            return malformed("trailing tokens after a complete assertion");
        AssertResult result;
        result.ok = value.truthy();
        if (!result.ok)
            result.detail = failure_detail(value);
        return result;
    }

private:
    static AssertResult malformed(const std::string& detail) {
        AssertResult result;
        result.ok = false;
        result.malformed = true;
        result.detail = "bad-assertion: " + detail;
        return result;
    }

    std::string failure_detail(const Value&) const {
        // For a top-level comparison, show both sides; the generic fallback
        // names the whole token list.
        if (top_cmp_set_)
            return "'" + top_lhs_text_ + "' " + tokens_[0] + " '" + top_rhs_text_ +
                   "' does not hold";
        std::string joined;
        for (const std::string& t : tokens_)
            joined += (joined.empty() ? "" : " ") + t;
        return "condition [" + joined + "] evaluated to false";
    }

    static bool is_comparison(const std::string& op) {
        return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
    }

    void set_error(const std::string& message) {
        if (!failed_) {
            failed_ = true;
            error_ = message;
        }
    }

    bool have_token() const { return pos_ < tokens_.size(); }

    const std::string& next_token() {
        static const std::string empty;
        if (!have_token()) {
            set_error("missing operand");
            return empty;
        }
        return tokens_[pos_++];
    }

    Value value_of(const std::string& token) {
        if (!token.empty() && token[0] == ':')
            return Value::text(token.substr(1));
        if (token.size() >= 2 && token.front() == '{' && token.back() == '}')
            return resolver_(token.substr(1, token.size() - 2));
        if (is_integer_token(token)) {
            errno = 0;
            char* end = nullptr;
            long long n = std::strtoll(token.c_str(), &end, 10);
            if (errno == 0 && end == token.c_str() + token.size())
                return Value::integer(n);
        }
        return Value::text(token);
    }

    Value eval(int depth = 0) {
        if (failed_)
            return Value::absent();
        if (depth > 64) {
            set_error("assertion nested too deeply");
            return Value::absent();
        }
        const std::string& token = next_token();
        if (failed_)
            return Value::absent();
        if (!is_assert_operator(token))
            return value_of(token);
        if (token == "not")
            return Value::boolean(!eval(depth + 1).truthy());
        if (token == "truthy")
            return Value::boolean(eval(depth + 1).truthy());
        if (token == "and") {
            Value a = eval(depth + 1);
            Value b = eval(depth + 1);
            return Value::boolean(a.truthy() && b.truthy());
        }
        if (token == "or") {
            Value a = eval(depth + 1);
            Value b = eval(depth + 1);
            return Value::boolean(a.truthy() || b.truthy());
        }
        if (token == "oracle")
            return eval_oracle();
        Value a = eval(depth + 1);
        Value b = eval(depth + 1);
        if (failed_)
            return Value::absent();
        if (depth == 0 && is_comparison(token)) {
            top_cmp_set_ = true;
            top_lhs_text_ = a.to_text();
            top_rhs_text_ = b.to_text();
        }
        if (is_comparison(token))
            return Value::boolean(compare(token, a, b));
        return arithmetic(token, a, b);
    }

    Value eval_oracle() {
        const std::string& name = next_token();
        if (failed_)
            return Value::absent();
        if (is_assert_operator(name)) {
            set_error("oracle name expected after 'oracle'");
            return Value::absent();
        }
        std::vector<Value> args;
        while (have_token()) {
            const std::string& token = next_token();
            if (is_assert_operator(token)) {
                set_error("oracle arguments must be plain values, got operator '" + token + "'");
                return Value::absent();
            }
            args.push_back(value_of(token));
        }
        std::optional<bool> verdict = oracle_ ? oracle_(name, args) : std::nullopt;
        if (!verdict) {
            set_error("unknown oracle '" + name + "'");
            return Value::absent();
        }
        return Value::boolean(*verdict);
    }

    /// Integers compare numerically, everything else lexically as text;
    /// mixed operand types fall back to text as well.
    static bool compare(const std::string& op, const Value& a, const Value& b) {
        int cmp;
        if (a.kind() == Value::Kind::Integer && b.kind() == Value::Kind::Integer) {
            std::int64_t x = a.as_integer();
            std::int64_t y = b.as_integer();
            cmp = x < y ? -1 : x > y ? 1 : 0;
        } else {
            std::string x = a.to_text();
            std::string y = b.to_text();
            cmp = x < y ? -1 : x > y ? 1 : 0;
        }
        if (op == "==")
            return cmp == 0;
        if (op == "!=")
            return cmp != 0;
        if (op == "<")
            return cmp < 0;
        if (op == "<=")
            return cmp <= 0;
        if (op == ">")
            return cmp > 0;
        return cmp >= 0;
    }

    /// Arithmetic requires two Integers; anything else (including division
    /// by zero) yields Absent, which is falsy downstream.
    static Value arithmetic(const std::string& op, const Value& a, const Value& b) {
        if (a.kind() != Value::Kind::Integer || b.kind() != Value::Kind::Integer)
            return Value::absent();
        std::int64_t x = a.as_integer();
        std::int64_t y = b.as_integer();
        if (op == "+")
            return Value::integer(x + y);
        if (op == "-")
            return Value::integer(x - y);
        if (op == "*")
            return Value::integer(x * y);
        if (y == 0)
            return Value::absent();
        return Value::integer(x / y);
    }

    const std::vector<std::string>& tokens_;
    const VarResolver& resolver_;
    const OracleFn& oracle_;
    std::size_t pos_ = 0;
    bool failed_ = false;
    std::string error_;
    bool top_cmp_set_ = false;
    std::string top_lhs_text_, top_rhs_text_;
};

} // namespace detail

/// Evaluates a serialized assertion. Never throws: malformed input comes
/// back as a failed result with a `bad-assertion:` detail. Placeholders the
/// resolver cannot satisfy evaluate as Absent, so a comparison against an
/// unresolvable variable fails by value, not by error.
inline AssertResult evaluate_assert(const std::vector<std::string>& parameters,
                                    const VarResolver& resolver, const OracleFn& oracle = {}) {
    return detail::AssertEvaluator(parameters, resolver, oracle).run();
}

} // namespace alia
