// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// AST for the attack description language. A description has three labeled
// sections (preconditions, actions, postconditions); actions are tool calls
// or control flow, and conditions attach to actions by label. All nodes are
// immutable after construction and safe to share across threads. Structural
// equality ignores source spans.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "alia/diagnostics.hpp"

namespace alia {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinaryOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };

inline const char* to_string(BinaryOp op) {
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
    return "?";
}

/// Expression tree. A bare variable reference used as a condition is a
/// truthiness test; there is no separate node for it.
struct Expr {
    enum class Kind { StringLit, IntLit, VarRef, FieldAccess, Not, Binary, OracleCall };

    Kind kind;
    SourceSpan span;

    std::string text;           // StringLit value, VarRef name, FieldAccess field, OracleCall name
    long long int_value = 0;    // IntLit
    BinaryOp op = BinaryOp::Or; // Binary
    ExprPtr lhs;                // Binary lhs, Not operand, FieldAccess base
    ExprPtr rhs;                // Binary rhs
    std::vector<ExprPtr> args;  // OracleCall arguments

    static ExprPtr string_lit(std::string value, SourceSpan span = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::StringLit;
        e->text = std::move(value);
        e->span = span;
        return e;
    }
    static ExprPtr int_lit(long long value, SourceSpan span = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::IntLit;
        e->int_value = value;
        e->span = span;
        return e;
    }
    static ExprPtr var_ref(std::string name, SourceSpan span = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::VarRef;
        e->text = std::move(name);
        e->span = span;
        return e;
    }
    static ExprPtr field_access(ExprPtr base, std::string field, SourceSpan span = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::FieldAccess;
        e->lhs = std::move(base);
        e->text = std::move(field);
        e->span = span;
        return e;
    }
    static ExprPtr not_of(ExprPtr operand, SourceSpan span = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Not;
        e->lhs = std::move(operand);
        e->span = span;
        return e;
    }
    static ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Binary;
        e->op = op;
        e->lhs = std::move(lhs);
        e->rhs = std::move(rhs);
        e->span = span;
        return e;
    }
    static ExprPtr oracle_call(std::string name, std::vector<ExprPtr> args, SourceSpan span = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::OracleCall;
        e->text = std::move(name);
        e->args = std::move(args);
        e->span = span;
        return e;
    }
};

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b)
        return !a && !b;
    if (a->kind != b->kind)
        return false;
    switch (a->kind) {
    case Expr::Kind::StringLit:
    case Expr::Kind::VarRef:
        return a->text == b->text;
    case Expr::Kind::IntLit:
        return a->int_value == b->int_value;
    case Expr::Kind::FieldAccess:
        return a->text == b->text && equal(a->lhs, b->lhs);
    case Expr::Kind::Not:
        return equal(a->lhs, b->lhs);
    case Expr::Kind::Binary:
        return a->op == b->op && equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case Expr::Kind::OracleCall: {
        if (a->text != b->text || a->args.size() != b->args.size())
            return false;
        for (std::size_t i = 0; i < a->args.size(); ++i)
            if (!equal(a->args[i], b->args[i]))
                return false;
        return true;
    }
    }
    return false;
}

enum class CallKind { Scan, Exploit };

inline const char* to_string(CallKind k) { return k == CallKind::Scan ? "scan" : "exploit"; }

struct CallArg {
    std::string name;
    ExprPtr value; // restricted by the grammar to string literals and lvalues
    SourceSpan span;

    friend bool operator==(const CallArg& a, const CallArg& b) {
        return a.name == b.name && equal(a.value, b.value);
    }
};

/// A tool invocation. The `type:` argument from source is carried in
/// `func_type`; remaining arguments keep source order.
struct CommandCall {
    CallKind kind = CallKind::Exploit;
    std::string func_type;
    std::vector<CallArg> args;

    friend bool operator==(const CommandCall& a, const CommandCall& b) {
        return a.kind == b.kind && a.func_type == b.func_type && a.args == b.args;
    }
};

struct AttackStep;

struct IfStep {
    ExprPtr condition;
    std::vector<AttackStep> then_steps;
    std::vector<AttackStep> else_steps;

    friend bool operator==(const IfStep& a, const IfStep& b);
};

struct WhileStep {
    ExprPtr condition;
    std::vector<AttackStep> body;

    friend bool operator==(const WhileStep& a, const WhileStep& b);
};

/// One labeled statement in the Actions section. `assign_target` is a dotted
/// path (e.g. `mytarget.ip`) and appears only with a CommandCall body.
struct AttackStep {
    std::string label;
    std::optional<std::vector<std::string>> assign_target;
    std::variant<CommandCall, IfStep, WhileStep> body;
    SourceSpan span;

    const CommandCall* call() const { return std::get_if<CommandCall>(&body); }
    const IfStep* if_step() const { return std::get_if<IfStep>(&body); }
    const WhileStep* while_step() const { return std::get_if<WhileStep>(&body); }

    friend bool operator==(const AttackStep& a, const AttackStep& b) {
        return a.label == b.label && a.assign_target == b.assign_target && a.body == b.body;
    }
};

inline bool operator==(const IfStep& a, const IfStep& b) {
    return equal(a.condition, b.condition) && a.then_steps == b.then_steps &&
           a.else_steps == b.else_steps;
}

inline bool operator==(const WhileStep& a, const WhileStep& b) {
    return equal(a.condition, b.condition) && a.body == b.body;
}

/// A label-linked assertion; boolean-valued under executor evaluation rules.
struct Condition {
    std::string label;
    ExprPtr expr;
    SourceSpan span;

    friend bool operator==(const Condition& a, const Condition& b) {
        return a.label == b.label && equal(a.expr, b.expr);
    }
};

struct AttackDescription {
    std::vector<Condition> preconditions;
    std::vector<AttackStep> actions;
    std::vector<Condition> postconditions;

    friend bool operator==(const AttackDescription& a, const AttackDescription& b) {
        return a.preconditions == b.preconditions && a.actions == b.actions &&
               a.postconditions == b.postconditions;
    }
};

/// Visits every step in the actions section, including steps nested in
/// control-flow blocks, in source order.
template <typename F>
inline void for_each_step(const std::vector<AttackStep>& steps, F&& fn) {
    for (const AttackStep& step : steps) {
        fn(step);
        if (const IfStep* s = step.if_step()) {
            for_each_step(s->then_steps, fn);
            for_each_step(s->else_steps, fn);
        } else if (const WhileStep* s = step.while_step()) {
            for_each_step(s->body, fn);
        }
    }
}

} // namespace alia
