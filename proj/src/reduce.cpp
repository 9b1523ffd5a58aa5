#include "mdc/reduce.hpp"

#include "mdc/eval.hpp"

#include <algorithm>
#include <functional>

namespace mdc {

std::set<std::string> DisjointnessSet::relations() const {
    std::set<std::string> out;
    for (const auto& r : rules)
        for (const auto& a : r.body) out.insert(a.relation);
    return out;
}

std::set<std::string> DisjointnessSet::relations(int arity) const {
    std::set<std::string> out;
    for (const auto& r : rules)
        for (const auto& a : r.body)
            if ((int)a.args.size() == arity) out.insert(a.relation);
    return out;
}

Program DisjointnessSet::to_program(const Schema& schema) const {
    Program p;
    p.schema = schema;
    for (const auto& r : rules) p.add_rule(r);
    if (!p.schema.contains("goal")) p.schema.declare("goal", 0);
    return p;
}

bool satisfies(const Instance& instance, const DisjointnessSet& d) {
    for (const auto& r : d.rules) {
        ConjunctiveQuery q;
        q.atoms = r.body;
        if (!eval_cq(q, instance).empty()) return false;
    }
    return true;
}

namespace {

Program rename_idbs(const Program& p, const std::string& prefix) {
    auto idb = p.idb_relations();
    auto rn = [&](const std::string& rel) {
        return idb.count(rel) ? prefix + rel : rel;
    };
    Program out;
    out.goal = prefix + p.goal;
    out.arity = p.arity;
    for (const auto& [rel, k] : p.schema.relations) out.schema.declare(rn(rel), k);
    for (const auto& r : p.rules) {
        Rule nr = r;
        for (auto* atoms : {&nr.head, &nr.body})
            for (auto& a : *atoms) a.relation = rn(a.relation);
        out.rules.push_back(std::move(nr));
    }
    return out;
}

}  // namespace

// Does some substitution embed the right rule's body into the annotated body
// with every head disjunct's negation present? sigma maps the right rule's
// variables to the annotated rule's terms by atom matching.
bool removal_applies(const Rule& right_rule, const Rule& annotated) {
    std::map<std::string, Term> sigma;
    std::function<bool(std::size_t)> match = [&](std::size_t i) -> bool {
        if (i == right_rule.body.size()) {
            for (const auto& h : right_rule.head) {
                Atom neg{"neg$" + h.relation, {}};
                for (const auto& t : h.args)
                    neg.args.push_back(t.is_var() ? sigma.at(t.name) : t);
                if (std::find(annotated.body.begin(), annotated.body.end(), neg) ==
                    annotated.body.end())
                    return false;
            }
            return true;
        }
        const Atom& pat = right_rule.body[i];
        for (const Atom& cand : annotated.body) {
            if (cand.relation != pat.relation || cand.args.size() != pat.args.size())
                continue;
            std::vector<std::string> bound;
            bool ok = true;
            for (std::size_t k = 0; k < pat.args.size() && ok; ++k) {
                const Term& s = pat.args[k];
                if (!s.is_var()) {
                    ok = s == cand.args[k];
                } else if (auto it = sigma.find(s.name); it != sigma.end()) {
                    ok = it->second == cand.args[k];
                } else {
                    sigma.emplace(s.name, cand.args[k]);
                    bound.push_back(s.name);
                }
            }
            if (ok && match(i + 1)) return true;
            for (const auto& v : bound) sigma.erase(v);
        }
        return false;
    };
    return match(0);
}

AnnotationSystem make_annotation_system(const Program& p1, const Program& p2) {
    if (!is_simple(p1) || !is_simple(p2))
        throw Error("to_emptiness: inputs must be simple");
    if (p1.arity != 0 || p2.arity != 0)
        throw Error("to_emptiness: inputs must be Boolean");

    AnnotationSystem sys;
    sys.left = p1;
    sys.right = rename_idbs(p2, "p2$");
    sys.right_goal = sys.right.goal;
    auto left_idb = p1.idb_relations();
    auto idb2 = sys.right.idb_relations();
    for (const auto& rel : idb2)
        if (left_idb.count(rel))
            throw Error("to_emptiness: IDB collision on " + rel);

    for (const auto& rel : idb2) {
        if (sys.right.schema.arity_of(rel) == 0) {
            if (rel != sys.right_goal) sys.nullary_idb2.push_back(rel);
        } else {
            sys.unary_idb2.push_back(rel);
        }
    }

    sys.edb_prime = p1.edb_schema();
    for (const auto& rel : idb2) {
        sys.edb_prime.declare(rel, sys.right.schema.arity_of(rel));
        sys.edb_prime.declare("neg$" + rel, sys.right.schema.arity_of(rel));
    }

    for (const auto& rel : sys.unary_idb2) {
        Rule d;
        d.body = {Atom{rel, {Term::var("X")}}, Atom{"neg$" + rel, {Term::var("X")}}};
        sys.disjointness.rules.push_back(std::move(d));
    }
    for (const auto& rel : sys.nullary_idb2) {
        Rule d;
        d.body = {Atom{rel, {}}, Atom{"neg$" + rel, {}}};
        sys.disjointness.rules.push_back(std::move(d));
    }
    {
        Rule d;
        d.body = {Atom{sys.right_goal, {}}, Atom{"neg$" + sys.right_goal, {}}};
        sys.disjointness.rules.push_back(std::move(d));
    }
    return sys;
}

ReductionResult to_emptiness(const Program& p1, const Program& p2,
                             const ReduceOptions& opts) {
    AnnotationSystem sys = make_annotation_system(p1, p2);
    const Program& right = sys.right;

    ReductionResult res;
    for (const auto& rel : sys.unary_idb2) res.mirror[rel] = "neg$" + rel;
    for (const auto& rel : sys.nullary_idb2) res.mirror[rel] = "neg$" + rel;
    res.mirror[sys.right_goal] = "neg$" + sys.right_goal;
    res.disjointness = sys.disjointness;

    Program& out = res.program;
    out.goal = p1.goal;
    out.arity = 0;
    out.forced_idb = p1.idb_relations();
    out.schema = Schema::merged(p1.schema, sys.edb_prime);

    std::uint64_t emitted = 0;
    for (const auto& r : p1.rules) {
        auto var_set = r.variables();
        std::vector<std::string> vars(var_set.begin(), var_set.end());

        // One annotation slot per (variable, unary P) pair and per nullary P;
        // goal2 always contributes its negation.
        std::vector<std::pair<std::string, std::string>> slots;  // (var, relation)
        for (const auto& v : vars)
            for (const auto& rel : sys.unary_idb2) slots.push_back({v, rel});
        const std::vector<std::string>& free_nullary = sys.nullary_idb2;

        Rule base = r;
        base.body.push_back(Atom{"neg$" + sys.right_goal, {}});

        std::function<void(std::size_t, std::size_t, Rule&)> emit =
            [&](std::size_t si, std::size_t ni, Rule& acc) {
                if (si < slots.size()) {
                    const auto& [v, rel] = slots[si];
                    acc.body.push_back(Atom{rel, {Term::var(v)}});
                    emit(si + 1, ni, acc);
                    acc.body.back() = Atom{"neg$" + rel, {Term::var(v)}};
                    emit(si + 1, ni, acc);
                    acc.body.pop_back();
                    return;
                }
                if (ni < free_nullary.size()) {
                    acc.body.push_back(Atom{free_nullary[ni], {}});
                    emit(si, ni + 1, acc);
                    acc.body.back() = Atom{"neg$" + free_nullary[ni], {}};
                    emit(si, ni + 1, acc);
                    acc.body.pop_back();
                    return;
                }
                if (++emitted > opts.max_rules)
                    throw LimitError("to_emptiness", "annotated rules", emitted,
                                     opts.max_rules);
                for (const auto& rr : right.rules)
                    if (removal_applies(rr, acc)) return;
                out.rules.push_back(acc);
            };
        emit(0, 0, base);
    }
    out.normalize();
    return res;
}

}  // namespace mdc
