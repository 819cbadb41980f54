// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Lowers a checked attack description to the compiled command format using a
// tool-mapping catalog. The output stays target-agnostic: literal string
// arguments are substituted at compile time, identifier arguments become
// `{name}` runtime placeholders in parameter position, and the bare
// identifier name in environment/tool position (sessions are routed by
// name). Actions expand to [precondition?, attack, postcondition?] in source
// order; control-flow steps compile to structured `axe if/while` commands
// with their nested commands in `body`/`else`.

#pragma once

#include <set>
#include <string>
#include <vector>

#include "alia/analyzer.hpp"
#include "alia/assertions.hpp"
#include "alia/ast.hpp"
#include "alia/compiled_script.hpp"
#include "alia/errors.hpp"
#include "alia/tool_mapping.hpp"

namespace alia {

/// Lowers one condition to an engine-internal assertion command.
inline CompiledCommand compile_condition(const Condition& cond, Phase phase) {
    CompiledCommand cmd;
    cmd.environment = "axe";
    cmd.tool = "assert";
    cmd.parameters = serialize_condition(cond.expr);
    cmd.label = cond.label;
    cmd.phase = phase;
    return cmd;
}

namespace detail {

class CompilerPass {
public:
    CompilerPass(const AttackDescription& ast, const ToolMapping& mapping)
        : mapping_(mapping), bindings_(label_bindings(ast)) {
        for (const AttackStep& step : ast.actions)
            compile_step_into(step, script_.execute);
    }

    CompiledScript take() { return std::move(script_); }

private:
    void compile_step_into(const AttackStep& step, std::vector<CompiledCommand>& sink) {
        const LabelBinding& binding = bindings_.at(step.label);
        if (binding.pre)
            sink.push_back(compile_condition(*binding.pre, Phase::Pre));
        if (const CommandCall* call = step.call())
            sink.push_back(compile_call(step, *call));
        else if (const IfStep* s = step.if_step())
            sink.push_back(compile_control(step, "if", s->condition, s->then_steps,
                                           &s->else_steps));
        else if (const WhileStep* s = step.while_step())
            sink.push_back(compile_control(step, "while", s->condition, s->body, nullptr));
        if (binding.post)
            sink.push_back(compile_condition(*binding.post, Phase::Post));
    }

    CompiledCommand compile_control(const AttackStep& step, const char* tool,
                                    const ExprPtr& condition,
                                    const std::vector<AttackStep>& body,
                                    const std::vector<AttackStep>* else_body) {
        CompiledCommand cmd;
        cmd.environment = "axe";
        cmd.tool = tool;
        cmd.parameters = serialize_condition(condition);
        cmd.label = step.label;
        cmd.phase = Phase::Attack;
        for (const AttackStep& sub : body)
            compile_step_into(sub, cmd.body);
        if (else_body)
            for (const AttackStep& sub : *else_body)
                compile_step_into(sub, cmd.else_body);
        return cmd;
    }

    CompiledCommand compile_call(const AttackStep& step, const CommandCall& call) {
        std::set<std::string> arg_names;
        for (const CallArg& arg : call.args)
            arg_names.insert(arg.name);
        if (!mapping_.contains(call.kind, call.func_type))
            throw Error("unknown-function", "action '" + step.label + "': no tool mapping for " +
                                                ToolMapping::key(call.kind, call.func_type));
        const ToolTemplate* tmpl = mapping_.find(call.kind, call.func_type, arg_names);
        if (!tmpl) {
            std::string provided;
            for (const std::string& name : arg_names)
                provided += (provided.empty() ? "" : ", ") + name;
            throw Error("template-arity",
                        "action '" + step.label + "': no variant of " +
                            ToolMapping::key(call.kind, call.func_type) +
                            " takes arguments {" + provided + "}");
        }

        CompiledCommand cmd;
        cmd.environment = substitute(tmpl->environment, call, *tmpl, step.label,
                                     /*value_position=*/false);
        cmd.tool = substitute(tmpl->tool, call, *tmpl, step.label, /*value_position=*/false);
        for (const std::string& parameter : tmpl->parameters)
            cmd.parameters.push_back(
                substitute(parameter, call, *tmpl, step.label, /*value_position=*/true));
        cmd.label = step.label;
        cmd.phase = Phase::Attack;
        if (step.assign_target)
            cmd.assign = join_path(*step.assign_target);
        detail::split_tool_words(cmd);
        return cmd;
    }

    std::string substitute(const std::string& tmpl, const CommandCall& call,
                           const ToolTemplate& variant, const std::string& label,
                           bool value_position) {
        std::string out;
        for (std::size_t i = 0; i < tmpl.size(); ++i) {
            if (tmpl[i] != '{') {
                out += tmpl[i];
                continue;
            }
            std::size_t end = tmpl.find('}', i + 1);
            if (end == std::string::npos) {
                out += tmpl.substr(i);
                break;
            }
            std::string name = tmpl.substr(i + 1, end - i - 1);
            i = end;
            const CallArg* arg = nullptr;
            for (const CallArg& candidate : call.args)
                if (candidate.name == name) {
                    arg = &candidate;
                    break;
                }
            if (!arg) {
                bool system = false;
                for (const std::string& sys : variant.system)
                    if (sys == name)
                        system = true;
                if (!system)
                    throw Error("template-arity",
                                "action '" + label + "': template needs argument '" + name +
                                    "' which the call does not provide");
                out += "{" + name + "}"; // runtime-resolved system variable
                continue;
            }
            out += argument_text(*arg, value_position);
        }
        return out;
    }

    static std::string argument_text(const CallArg& arg, bool value_position) {
        const Expr& value = *arg.value;
        switch (value.kind) {
        case Expr::Kind::StringLit:
            return value.text;
        case Expr::Kind::IntLit:
            return std::to_string(value.int_value);
        case Expr::Kind::VarRef:
        case Expr::Kind::FieldAccess: {
            std::string path = detail::dotted_path_of(value);
            return value_position ? "{" + path + "}" : path;
        }
        default:
            return "";
        }
    }

    const ToolMapping& mapping_;
    std::map<std::string, LabelBinding> bindings_;
    CompiledScript script_;
};

} // namespace detail

/// Compiles a description whose analysis produced no errors. Fails with
/// `unknown-function` (unmapped func_type, names the action), `template-arity`
/// (argument/template mismatch), or `unresolved-labels` (dirty label closure).
/// Pure: byte-identical inputs give byte-identical output, independent of any
/// profile.
inline CompiledScript compile(const AttackDescription& ast, const ToolMapping& mapping) {
    return detail::CompilerPass(ast, mapping).take();
}

inline CompiledScript compile(const AttackDescription& ast) {
    return compile(ast, default_tool_mapping());
}

} // namespace alia
