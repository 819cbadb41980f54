// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Static checks over a parsed attack description, optionally informed by a
// target profile. Identifiers fall into two classes: auxiliary variables
// (assigned by some action) and system variables (never assigned, resolved
// from the profile at run time). Where an identifier appears decides how a
// missing definition is reported:
//
//   - call/oracle argument position: a system-variable slot; unknown to the
//     given profile → warning `unknown-system-variable`.
//   - expression position (conditions): never assigned and unknown to the
//     profile → error `undefined-variable`.
//   - without a profile both cases are downgraded to a note
//     `assumed-system-variable`, since only the target knows its variables.
//
// Reserved observation names (published by tool adapters at run time, e.g.
// WIFI) are exempt everywhere. Label closure: every pre/postcondition label
// must name an action (`dangling-label`), action labels must be unique
// across all nesting depths (`duplicate-label`).

#pragma once

#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "alia/ast.hpp"
#include "alia/diagnostics.hpp"
#include "alia/errors.hpp"
#include "alia/knowledge_base.hpp"

namespace alia {

struct SymbolTable {
    /// Identifier → index of the top-level action that first assigns it.
    std::map<std::string, std::size_t> auxiliary;
    /// Identifiers referenced anywhere but never assigned.
    std::set<std::string> system_candidates;
};

struct LabelBinding {
    const Condition* pre = nullptr;
    const AttackStep* action = nullptr;
    const Condition* post = nullptr;
};

struct AnalyzerOptions {
    const SutProfile* profile = nullptr;
    /// Names tool adapters may publish at run time; see the adapter manifest.
    std::set<std::string> reserved_observations = {"WIFI"};
    std::set<std::string> oracles = {"CAN_MESSAGE"};
};

namespace detail {

struct StepRec {
    const AttackStep* step;
    std::size_t seq;      // source order over all steps, any depth
    std::size_t toplevel; // index of the enclosing top-level action
    bool in_branch;       // nested inside an if/while block
};

struct AssignSite {
    std::size_t seq;
    bool in_branch;
};

class StepIndex {
public:
    explicit StepIndex(const AttackDescription& ast) {
        for (std::size_t i = 0; i < ast.actions.size(); ++i)
            collect(ast.actions[i], i, false);
    }

    const std::vector<StepRec>& steps() const { return steps_; }

    const std::vector<AssignSite>* assigns_of(const std::string& name) const {
        auto it = assigns_.find(name);
        return it == assigns_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, std::vector<AssignSite>>& assigns() const { return assigns_; }

    /// Sequence number of the first step carrying `label`, or nullopt.
    std::optional<std::size_t> seq_of_label(const std::string& label) const {
        auto it = label_seq_.find(label);
        if (it == label_seq_.end())
            return std::nullopt;
        return it->second;
    }

private:
    void collect(const AttackStep& step, std::size_t toplevel, bool in_branch) {
        std::size_t seq = steps_.size();
        steps_.push_back({&step, seq, toplevel, in_branch});
        label_seq_.emplace(step.label, seq);
        if (step.assign_target && !step.assign_target->empty())
            assigns_[(*step.assign_target)[0]].push_back({seq, in_branch});
        if (const IfStep* s = step.if_step()) {
            for (const AttackStep& sub : s->then_steps)
                collect(sub, toplevel, true);
            for (const AttackStep& sub : s->else_steps)
                collect(sub, toplevel, true);
        } else if (const WhileStep* s = step.while_step()) {
            for (const AttackStep& sub : s->body)
                collect(sub, toplevel, true);
        }
    }

    std::vector<StepRec> steps_;
    std::map<std::string, std::vector<AssignSite>> assigns_;
    std::map<std::string, std::size_t> label_seq_;
};

class Checker {
public:
    Checker(const AttackDescription& ast, const AnalyzerOptions& options)
        : ast_(ast), options_(options), index_(ast) {}

    std::vector<Diagnostic> run() {
        check_labels();
        for (const Condition& cond : ast_.preconditions)
            check_condition(cond, /*post=*/false);
        for (const StepRec& rec : index_.steps())
            check_step(rec);
        for (const Condition& cond : ast_.postconditions)
            check_condition(cond, /*post=*/true);
        sort_diagnostics(diags_);
        return std::move(diags_);
    }

private:
    static constexpr std::size_t no_limit = std::numeric_limits<std::size_t>::max();

    void emit(Severity sev, const char* code, std::string message, SourceSpan span) {
        diags_.push_back({sev, code, std::move(message), span});
    }

    void check_labels() {
        std::set<std::string> seen;
        for (const StepRec& rec : index_.steps())
            if (!seen.insert(rec.step->label).second)
                emit(Severity::Error, "duplicate-label",
                     "label '" + rec.step->label + "' is already used by an earlier action",
                     rec.step->span);
        auto check_dangling = [&](const std::vector<Condition>& conds) {
            for (const Condition& cond : conds)
                if (!index_.seq_of_label(cond.label))
                    emit(Severity::Error, "dangling-label",
                         "no action is labeled '" + cond.label + "'", cond.span);
        };
        check_dangling(ast_.preconditions);
        check_dangling(ast_.postconditions);
    }

    void check_condition(const Condition& cond, bool post) {
        // A condition is evaluated just before (pre) or just after (post) its
        // action, so it may read assignments strictly before the action, or
        // up to and including it for a postcondition.
        std::size_t limit = no_limit;
        if (std::optional<std::size_t> seq = index_.seq_of_label(cond.label))
            limit = post ? *seq + 1 : *seq;
        if (cond.expr)
            check_expr(*cond.expr, limit, /*slot=*/false);
    }

    void check_step(const StepRec& rec) {
        if (const CommandCall* call = rec.step->call()) {
            for (const CallArg& arg : call->args)
                if (arg.value)
                    check_expr(*arg.value, rec.seq, /*slot=*/true);
        } else if (const IfStep* s = rec.step->if_step()) {
            if (s->condition)
                check_expr(*s->condition, rec.seq, /*slot=*/false);
        } else if (const WhileStep* s = rec.step->while_step()) {
            if (s->condition)
                check_expr(*s->condition, rec.seq, /*slot=*/false);
        }
    }

    void check_expr(const Expr& e, std::size_t limit, bool slot) {
        switch (e.kind) {
        case Expr::Kind::StringLit:
        case Expr::Kind::IntLit:
            return;
        case Expr::Kind::VarRef:
            check_ref(e.text, e.span, limit, slot);
            return;
        case Expr::Kind::FieldAccess: {
            const Expr* root = &e;
            while (root->kind == Expr::Kind::FieldAccess)
                root = root->lhs.get();
            if (root->kind == Expr::Kind::VarRef)
                check_ref(root->text, root->span, limit, slot);
            return;
        }
        case Expr::Kind::Not:
            check_expr(*e.lhs, limit, slot);
            return;
        case Expr::Kind::Binary:
            check_expr(*e.lhs, limit, slot);
            check_expr(*e.rhs, limit, slot);
            return;
        case Expr::Kind::OracleCall:
            if (!options_.oracles.count(e.text))
                emit(Severity::Error, "unknown-oracle", "unknown oracle '" + e.text + "'",
                     e.span);
            // Oracle arguments are system-variable slots: message symbols and
            // the like, resolved from the profile at run time.
            for (const ExprPtr& arg : e.args)
                if (arg)
                    check_expr(*arg, limit, /*slot=*/true);
            return;
        }
    }

    void check_ref(const std::string& name, SourceSpan span, std::size_t limit, bool slot) {
        if (const std::vector<AssignSite>* sites = index_.assigns_of(name)) {
            bool eligible_plain = false;
            bool eligible_branch = false;
            for (const AssignSite& site : *sites)
                if (site.seq < limit)
                    (site.in_branch ? eligible_branch : eligible_plain) = true;
            if (eligible_plain)
                return;
            if (eligible_branch)
                emit(Severity::Warning, "possibly-undefined",
                     "'" + name + "' is only assigned inside a conditional branch and may be "
                                  "undefined here",
                     span);
            else
                emit(Severity::Warning, "use-before-definition",
                     "'" + name + "' is read before its first assignment", span);
            return;
        }
        if (options_.reserved_observations.count(name))
            return;
        if (!options_.profile) {
            emit(Severity::Note, "assumed-system-variable",
                 "assuming '" + name + "' is a system variable (no profile given)", span);
            return;
        }
        if (options_.profile->contains(name))
            return;
        if (slot)
            emit(Severity::Warning, "unknown-system-variable",
                 "system variable '" + name + "' is not defined by profile '" +
                     options_.profile->id + "'",
                 span);
        else
            emit(Severity::Error, "undefined-variable",
                 "variable '" + name + "' is never assigned and not defined by profile '" +
                     options_.profile->id + "'",
                 span);
    }

    const AttackDescription& ast_;
    const AnalyzerOptions& options_;
    StepIndex index_;
    std::vector<Diagnostic> diags_;
};

} // namespace detail

/// Runs every static check; an empty result means the description is clean.
/// Deterministic: diagnostics come back stably ordered by source position.
inline std::vector<Diagnostic> check(const AttackDescription& ast,
                                     const AnalyzerOptions& options = {}) {
    return detail::Checker(ast, options).run();
}

inline std::vector<Diagnostic> check(const AttackDescription& ast, const SutProfile& profile) {
    AnalyzerOptions options;
    options.profile = &profile;
    return check(ast, options);
}

/// Classifies identifiers into auxiliary variables (with their defining
/// top-level action index) and system-variable candidates.
inline SymbolTable build_symbol_table(const AttackDescription& ast) {
    detail::StepIndex index(ast);
    SymbolTable table;
    for (const auto& [name, sites] : index.assigns()) {
        std::size_t toplevel = std::numeric_limits<std::size_t>::max();
        std::size_t best_seq = std::numeric_limits<std::size_t>::max();
        for (const detail::AssignSite& site : sites)
            if (site.seq < best_seq) {
                best_seq = site.seq;
                toplevel = index.steps()[site.seq].toplevel;
            }
        table.auxiliary.emplace(name, toplevel);
    }
    struct Collector {
        const detail::StepIndex& index;
        SymbolTable& table;
        void visit(const Expr& e) {
            switch (e.kind) {
            case Expr::Kind::VarRef:
                if (!index.assigns_of(e.text))
                    table.system_candidates.insert(e.text);
                return;
            case Expr::Kind::FieldAccess: {
                const Expr* root = &e;
                while (root->kind == Expr::Kind::FieldAccess)
                    root = root->lhs.get();
                if (root->kind == Expr::Kind::VarRef && !index.assigns_of(root->text))
                    table.system_candidates.insert(root->text);
                return;
            }
            case Expr::Kind::Not:
                visit(*e.lhs);
                return;
            case Expr::Kind::Binary:
                visit(*e.lhs);
                visit(*e.rhs);
                return;
            case Expr::Kind::OracleCall:
                for (const ExprPtr& arg : e.args)
                    if (arg)
                        visit(*arg);
                return;
            default:
                return;
            }
        }
    } collector{index, table};
    for (const Condition& c : ast.preconditions)
        if (c.expr)
            collector.visit(*c.expr);
    for (const detail::StepRec& rec : index.steps()) {
        if (const CommandCall* call = rec.step->call()) {
            for (const CallArg& arg : call->args)
                if (arg.value)
                    collector.visit(*arg.value);
        } else if (const IfStep* s = rec.step->if_step()) {
            if (s->condition)
                collector.visit(*s->condition);
        } else if (const WhileStep* s = rec.step->while_step()) {
            if (s->condition)
                collector.visit(*s->condition);
        }
    }
    for (const Condition& c : ast.postconditions)
        if (c.expr)
            collector.visit(*c.expr);
    return table;
}

/// Binds each action label to its optional pre/postconditions. When two
/// conditions share a label the first in source order wins; condition labels
/// are deliberately not checked against each other.
/// Fails with `unresolved-labels` when the AST has dangling or duplicate
/// labels. Returned pointers alias `ast`.
inline std::map<std::string, LabelBinding> label_bindings(const AttackDescription& ast) {
    detail::StepIndex index(ast);
    std::set<std::string> seen;
    for (const detail::StepRec& rec : index.steps())
        if (!seen.insert(rec.step->label).second)
            throw Error("unresolved-labels",
                        "duplicate action label '" + rec.step->label + "'");
    for (const std::vector<Condition>* conds : {&ast.preconditions, &ast.postconditions})
        for (const Condition& cond : *conds)
            if (!seen.count(cond.label))
                throw Error("unresolved-labels",
                            "condition label '" + cond.label + "' matches no action");

    std::map<std::string, LabelBinding> bindings;
    for (const detail::StepRec& rec : index.steps())
        bindings[rec.step->label].action = rec.step;
    for (const Condition& cond : ast.preconditions) {
        LabelBinding& b = bindings[cond.label];
        if (!b.pre)
            b.pre = &cond;
    }
    for (const Condition& cond : ast.postconditions) {
        LabelBinding& b = bindings[cond.label];
        if (!b.post)
            b.post = &cond;
    }
    return bindings;
}

} // namespace alia
