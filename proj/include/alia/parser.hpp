// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Recursive-descent parser for attack description source. The grammar:
//
//   desc := "PreConditions:" cond* "Actions:" step* "PostConditions:" cond*
//   cond := LABEL ":" expr
//   step := LABEL ":" [lvalue "="] call
//         | LABEL ":" "if" "(" expr ")" block ["else" block]
//         | LABEL ":" "while" "(" expr ")" block
//   call := ("scan"|"exploit") "(" "type" ":" IDENT ("," IDENT ":" arg)* ")"
//   arg  := STRING | lvalue            (IDENT is a one-segment lvalue)
//   lvalue := IDENT ("." IDENT)*
//   block  := "{" step* "}"
//
// Expression precedence, loosest first: or, and, not, comparison
// (== != < <= > >=), additive (+ -), multiplicative (* /). `Oracle.NAME(...)`
// is a primary. One statement per line; `//` starts a line comment.
//
// Errors never abort: a malformed line is dropped with an error diagnostic
// and parsing resumes on the next line, so a single mistake still yields a
// best-effort AST plus every later diagnostic.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "alia/ast.hpp"
#include "alia/lexer.hpp"
#include "alia/value.hpp"

namespace alia {

namespace detail {

inline bool is_keyword(const std::string& s) {
    return s == "scan" || s == "exploit" || s == "if" || s == "else" || s == "while" ||
           s == "not" || s == "and" || s == "or" || s == "Oracle";
}

inline bool is_section_header(const std::string& s) {
    return s == "PreConditions" || s == "Actions" || s == "PostConditions";
}

struct LineError {
    Diagnostic diag;
};

class Parser {
public:
    explicit Parser(const std::string& source) : tokens_(Lexer(source).run()) {}

    std::pair<AttackDescription, std::vector<Diagnostic>> run() {
        AttackDescription desc;
        skip_newlines();
        expect_header("PreConditions");
        parse_conditions(desc.preconditions, "Actions");
        expect_header("Actions");
        parse_steps_until_header(desc.actions);
        expect_header("PostConditions");
        parse_conditions(desc.postconditions, nullptr);
        sort_diagnostics(diags_);
        return {std::move(desc), std::move(diags_)};
    }

private:
    const Token& cur(int ahead = 0) const {
        std::size_t i = pos_ + static_cast<std::size_t>(ahead);
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }

    bool check(Tok kind, int ahead = 0) const { return cur(ahead).kind == kind; }

    bool check_ident(const char* text, int ahead = 0) const {
        return check(Tok::Ident, ahead) && cur(ahead).text == text;
    }

    Token take() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

    Token expect(Tok kind, const char* what) {
        if (!check(kind)) {
            // A line that ends inside an open group is a paren problem, not
            // a generic one.
            bool at_line_end = check(Tok::Newline) || check(Tok::End);
            fail(at_line_end ? paren_depth_hint() : "syntax-error",
                 std::string("expected ") + what + here());
        }
        return take();
    }

    std::string here() const {
        const Token& t = cur();
        if (t.kind == Tok::Newline)
            return ", got end of line";
        if (t.kind == Tok::End)
            return ", got end of input";
        if (t.kind == Tok::Bad)
            return " (" + t.text + ")";
        return ", got '" + t.text + "'";
    }

    [[noreturn]] void fail(const char* code, const std::string& message) {
        throw LineError{Diagnostic{Severity::Error, code, message, cur().span}};
    }

    void skip_newlines() {
        while (check(Tok::Newline))
            take();
    }

    /// Drops the remainder of the current line; used for error recovery.
    void sync_to_next_line() {
        while (!check(Tok::Newline) && !check(Tok::End))
            take();
        if (check(Tok::Newline))
            take();
    }

    bool at_header() const {
        return check(Tok::Ident) && is_section_header(cur().text) && check(Tok::Colon, 1) &&
               (check(Tok::Newline, 2) || check(Tok::End, 2));
    }

    bool at_header(const char* name) const { return at_header() && cur().text == name; }

    void expect_header(const char* name) {
        skip_newlines();
        if (at_header(name)) {
            take(); // name
            take(); // colon
            skip_newlines();
            return;
        }
        diags_.push_back({Severity::Error, "missing-section",
                          std::string("expected section header '") + name + ":'", cur().span});
        // Scan forward to where this section plausibly starts; if another
        // known header is already here, treat the section as empty.
        while (!check(Tok::End) && !at_header())
            sync_to_next_line();
        if (at_header(name)) {
            take();
            take();
            skip_newlines();
        }
    }

    void parse_conditions(std::vector<Condition>& out, const char* stop_header) {
        while (!check(Tok::End) && !at_header()) {
            try {
                out.push_back(parse_condition_line());
            } catch (const LineError& e) {
                diags_.push_back(e.diag);
                sync_to_next_line();
            }
            skip_newlines();
        }
        (void)stop_header;
    }

    Condition parse_condition_line() {
        Condition cond;
        Token label = expect(Tok::Ident, "a condition label");
        cond.label = label.text;
        cond.span = label.span;
        if (is_keyword(cond.label))
            fail("syntax-error", "'" + cond.label + "' cannot be used as a label");
        expect(Tok::Colon, "':' after the condition label");
        cond.expr = parse_expr();
        if (!check(Tok::Newline) && !check(Tok::End))
            fail(paren_depth_hint(), "unexpected trailing input after condition" + here());
        return cond;
    }

    void parse_steps_until_header(std::vector<AttackStep>& out) {
        while (!check(Tok::End) && !at_header()) {
            try {
                out.push_back(parse_step());
            } catch (const LineError& e) {
                diags_.push_back(e.diag);
                sync_to_next_line();
            }
            skip_newlines();
        }
    }

    AttackStep parse_step() {
        AttackStep step;
        if (!check(Tok::Ident) || is_keyword(cur().text))
            fail("missing-label", "every action needs a 'label:' prefix" + here());
        Token label = take();
        step.label = label.text;
        step.span = label.span;
        expect(Tok::Colon, "':' after the action label");

        if (check_ident("if")) {
            step.body = parse_if();
            return step;
        }
        if (check_ident("while")) {
            step.body = parse_while();
            return step;
        }

        if (!is_call_start()) {
            // lvalue "=" call
            step.assign_target = parse_lvalue_path();
            expect(Tok::Assign, "'=' after the assignment target");
            if (!is_call_start())
                fail("syntax-error", "expected scan(...) or exploit(...)" + here());
        }
        step.body = parse_call();
        if (!check(Tok::Newline) && !check(Tok::End))
            fail(paren_depth_hint(), "unexpected trailing input after action" + here());
        return step;
    }

    bool is_call_start() const {
        return (check_ident("scan") || check_ident("exploit")) && check(Tok::LParen, 1);
    }

    std::vector<std::string> parse_lvalue_path() {
        std::vector<std::string> path;
        Token first = expect(Tok::Ident, "a variable name");
        if (is_keyword(first.text))
            fail("syntax-error", "'" + first.text + "' cannot be used as a variable name");
        path.push_back(first.text);
        while (check(Tok::Dot)) {
            take();
            path.push_back(expect(Tok::Ident, "a field name after '.'").text);
        }
        return path;
    }

    CommandCall parse_call() {
        CommandCall call;
        Token kind = take();
        call.kind = kind.text == "scan" ? CallKind::Scan : CallKind::Exploit;
        expect(Tok::LParen, "'('");
        ++parens_;
        if (!check_ident("type"))
            fail("syntax-error", "the first argument of a call must be 'type:'" + here());
        take();
        expect(Tok::Colon, "':' after 'type'");
        call.func_type = expect(Tok::Ident, "a function type name").text;
        while (check(Tok::Comma)) {
            take();
            CallArg arg;
            Token name = expect(Tok::Ident, "an argument name");
            arg.name = name.text;
            arg.span = name.span;
            if (arg.name == "type")
                fail("syntax-error", "duplicate 'type' argument");
            for (const CallArg& prev : call.args)
                if (prev.name == arg.name)
                    fail("syntax-error", "duplicate argument '" + arg.name + "'");
            expect(Tok::Colon, "':' after the argument name");
            arg.value = parse_call_arg();
            call.args.push_back(std::move(arg));
        }
        expect(Tok::RParen, "')' to close the call");
        --parens_;
        return call;
    }

    ExprPtr parse_call_arg() {
        if (check(Tok::String)) {
            Token t = take();
            return Expr::string_lit(t.text, t.span);
        }
        if (check(Tok::Ident) && !is_keyword(cur().text))
            return parse_lvalue_expr();
        fail("syntax-error", "expected a string literal or variable as argument value" + here());
    }

    ExprPtr parse_lvalue_expr() {
        Token first = take();
        ExprPtr e = Expr::var_ref(first.text, first.span);
        while (check(Tok::Dot)) {
            take();
            Token field = expect(Tok::Ident, "a field name after '.'");
            e = Expr::field_access(std::move(e), field.text, field.span);
        }
        return e;
    }

    IfStep parse_if() {
        take(); // if
        IfStep s;
        expect(Tok::LParen, "'(' after 'if'");
        ++parens_;
        s.condition = parse_expr();
        expect(Tok::RParen, "')' after the if condition");
        --parens_;
        parse_block(s.then_steps);
        skip_newlines();
        if (check_ident("else")) {
            take();
            parse_block(s.else_steps);
        }
        return s;
    }

    WhileStep parse_while() {
        take(); // while
        WhileStep s;
        expect(Tok::LParen, "'(' after 'while'");
        ++parens_;
        s.condition = parse_expr();
        expect(Tok::RParen, "')' after the while condition");
        --parens_;
        parse_block(s.body);
        return s;
    }

    void parse_block(std::vector<AttackStep>& out) {
        expect(Tok::LBrace, "'{'");
        skip_newlines();
        while (!check(Tok::RBrace)) {
            if (check(Tok::End))
                fail("syntax-error", "unclosed '{' block");
            try {
                out.push_back(parse_step());
            } catch (const LineError& e) {
                diags_.push_back(e.diag);
                sync_to_next_line();
            }
            skip_newlines();
        }
        take(); // }
    }

    const char* paren_depth_hint() const {
        return parens_ > 0 ? "unbalanced-parens" : "syntax-error";
    }

    // --- expressions ---

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (check_ident("or")) {
            Token op = take();
            e = Expr::binary(BinaryOp::Or, std::move(e), parse_and(), op.span);
        }
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_not();
        while (check_ident("and")) {
            Token op = take();
            e = Expr::binary(BinaryOp::And, std::move(e), parse_not(), op.span);
        }
        return e;
    }

    ExprPtr parse_not() {
        if (check_ident("not")) {
            Token op = take();
            return Expr::not_of(parse_not(), op.span);
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        ExprPtr e = parse_additive();
        while (true) {
            BinaryOp op;
            if (check(Tok::EqEq))
                op = BinaryOp::Eq;
            else if (check(Tok::Ne))
                op = BinaryOp::Ne;
            else if (check(Tok::Lt))
                op = BinaryOp::Lt;
            else if (check(Tok::Le))
                op = BinaryOp::Le;
            else if (check(Tok::Gt))
                op = BinaryOp::Gt;
            else if (check(Tok::Ge))
                op = BinaryOp::Ge;
            else
                break;
            Token t = take();
            e = Expr::binary(op, std::move(e), parse_additive(), t.span);
        }
        return e;
    }

    ExprPtr parse_additive() {
        ExprPtr e = parse_multiplicative();
        while (check(Tok::Plus) || check(Tok::Minus)) {
            Token t = take();
            BinaryOp op = t.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
            e = Expr::binary(op, std::move(e), parse_multiplicative(), t.span);
        }
        return e;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr e = parse_primary();
        while (check(Tok::Star) || check(Tok::Slash)) {
            Token t = take();
            BinaryOp op = t.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
            e = Expr::binary(op, std::move(e), parse_primary(), t.span);
        }
        return e;
    }

    ExprPtr parse_primary() {
        if (check(Tok::Int)) {
            Token t = take();
            return Expr::int_lit(t.int_value, t.span);
        }
        if (check(Tok::String)) {
            Token t = take();
            return Expr::string_lit(t.text, t.span);
        }
        if (check(Tok::LParen)) {
            take();
            ++parens_;
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            --parens_;
            return e;
        }
        if (check_ident("Oracle"))
            return parse_oracle_call();
        if (check(Tok::Ident) && !is_keyword(cur().text))
            return parse_lvalue_expr();
        fail("syntax-error", "expected an expression" + here());
    }

    ExprPtr parse_oracle_call() {
        Token oracle = take(); // Oracle
        expect(Tok::Dot, "'.' after 'Oracle'");
        Token name = expect(Tok::Ident, "an oracle name");
        expect(Tok::LParen, "'(' after the oracle name");
        ++parens_;
        std::vector<ExprPtr> args;
        if (!check(Tok::RParen)) {
            args.push_back(parse_expr());
            while (check(Tok::Comma)) {
                take();
                args.push_back(parse_expr());
            }
        }
        expect(Tok::RParen, "')' to close the oracle call");
        --parens_;
        SourceSpan span = oracle.span;
        span.column_end = name.span.column_end;
        return Expr::oracle_call(name.text, std::move(args), span);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int parens_ = 0;
    std::vector<Diagnostic> diags_;
};

// --- pretty printing ---

inline int expr_precedence(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Binary:
        switch (e.op) {
        case BinaryOp::Or: return 1;
        case BinaryOp::And: return 2;
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 4;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 6;
        }
        return 7;
    case Expr::Kind::Not: return 3;
    default: return 7;
    }
}

inline void print_expr(const Expr& e, std::string& out, int min_prec = 1) {
    int prec = expr_precedence(e);
    bool parens = prec < min_prec;
    if (parens)
        out += '(';
    switch (e.kind) {
    case Expr::Kind::StringLit: {
        char quote = e.text.find('"') == std::string::npos ? '"' : '\'';
        out += quote;
        out += e.text;
        out += quote;
        break;
    }
    case Expr::Kind::IntLit:
        out += std::to_string(e.int_value);
        break;
    case Expr::Kind::VarRef:
        out += e.text;
        break;
    case Expr::Kind::FieldAccess:
        print_expr(*e.lhs, out, 7);
        out += '.';
        out += e.text;
        break;
    case Expr::Kind::Not:
        out += "not ";
        print_expr(*e.lhs, out, 3);
        break;
    case Expr::Kind::Binary:
        print_expr(*e.lhs, out, prec);
        out += ' ';
        out += to_string(e.op);
        out += ' ';
        print_expr(*e.rhs, out, prec + 1);
        break;
    case Expr::Kind::OracleCall:
        out += "Oracle.";
        out += e.text;
        out += '(';
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i)
                out += ", ";
            print_expr(*e.args[i], out, 1);
        }
        out += ')';
        break;
    }
    if (parens)
        out += ')';
}

inline std::string print_expr(const ExprPtr& e) {
    std::string out;
    if (e)
        print_expr(*e, out);
    return out;
}

inline void print_step(const AttackStep& step, std::string& out, int depth);

inline void print_block(const std::vector<AttackStep>& steps, std::string& out, int depth) {
    out += "{\n";
    for (const AttackStep& s : steps)
        print_step(s, out, depth + 1);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += '}';
}

inline void print_step(const AttackStep& step, std::string& out, int depth) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += step.label;
    out += ": ";
    if (const CommandCall* call = step.call()) {
        if (step.assign_target) {
            out += join_path(*step.assign_target);
            out += " = ";
        }
        out += to_string(call->kind);
        out += "(type:";
        out += call->func_type;
        for (const CallArg& arg : call->args) {
            out += ", ";
            out += arg.name;
            out += ':';
            print_expr(*arg.value, out, 7);
        }
        out += ")\n";
    } else if (const IfStep* s = step.if_step()) {
        out += "if (";
        print_expr(*s->condition, out);
        out += ") ";
        print_block(s->then_steps, out, depth);
        if (!s->else_steps.empty()) {
            out += " else ";
            print_block(s->else_steps, out, depth);
        }
        out += '\n';
    } else if (const WhileStep* s = step.while_step()) {
        out += "while (";
        print_expr(*s->condition, out);
        out += ") ";
        print_block(s->body, out, depth);
        out += '\n';
    }
}

} // namespace detail

/// Parses source text into an AST plus positioned diagnostics. Never throws
/// on bad input; malformed lines are dropped and diagnosed.
inline std::pair<AttackDescription, std::vector<Diagnostic>> parse(const std::string& source) {
    return detail::Parser(source).run();
}

/// Canonical formatter: one statement per line, two-space indent, `key:value`
/// argument spacing. `parse(pretty_print(ast))` reproduces `ast`.
inline std::string pretty_print(const AttackDescription& desc) {
    std::string out = "PreConditions:\n";
    for (const Condition& c : desc.preconditions)
        out += "  " + c.label + ": " + detail::print_expr(c.expr) + "\n";
    out += "Actions:\n";
    for (const AttackStep& s : desc.actions)
        detail::print_step(s, out, 1);
    out += "PostConditions:\n";
    for (const Condition& c : desc.postconditions)
        out += "  " + c.label + ": " + detail::print_expr(c.expr) + "\n";
    return out;
}

} // namespace alia
