#include "mdc/mmsnp.hpp"

#include "mdc/eval.hpp"

#include <algorithm>
#include <functional>

namespace mdc {

namespace {

std::set<std::string> clause_variables(const MMSNPClause& c) {
    std::set<std::string> out;
    for (const auto& a : c.alphas)
        for (const auto& t : a.args) out.insert(t.name);
    for (const auto& a : c.betas)
        for (const auto& t : a.args) out.insert(t.name);
    return out;
}

}  // namespace

bool eval_mmsnp(const MMSNPSentence& phi, const Instance& instance,
                const MMSNPOptions& opts) {
    auto adom = instance.adom();
    if (adom.size() > opts.max_adom)
        throw LimitError("eval_mmsnp", "active domain", adom.size(), opts.max_adom);
    std::vector<std::string> dom(adom.begin(), adom.end());
    std::set<std::string> so(phi.so_vars.begin(), phi.so_vars.end());

    // Propositional variables are pairs (SO variable, element); clauses come
    // from grounding each implication over the clause's own variables.
    GroundTheory theory;
    auto intern = [&theory](const std::string& so_var, const std::string& elem) {
        Atom a{so_var, {Term::cst(elem)}};
        auto it = theory.atom_ids.find(a);
        if (it != theory.atom_ids.end()) return it->second;
        std::int32_t id = (std::int32_t)theory.atom_table.size();
        theory.atom_table.push_back(a);
        theory.atom_ids.emplace(std::move(a), id);
        return id;
    };

    for (const auto& clause : phi.clauses) {
        auto var_set = clause_variables(clause);
        std::vector<std::string> vars(var_set.begin(), var_set.end());
        std::map<std::string, std::string> bind;
        std::function<void(std::size_t)> ground = [&](std::size_t i) {
            if (i == vars.size()) {
                GroundClause gc;
                std::set<std::int32_t> body, head;
                for (const auto& a : clause.alphas) {
                    if (so.count(a.relation)) {
                        body.insert(intern(a.relation, bind.at(a.args[0].name)));
                    } else {
                        Atom fact{a.relation, {}};
                        for (const auto& t : a.args)
                            fact.args.push_back(Term::cst(bind.at(t.name)));
                        if (!instance.facts.count(fact)) return;  // vacuous
                    }
                }
                for (const auto& a : clause.betas)
                    head.insert(intern(a.relation, bind.at(a.args[0].name)));
                for (auto h : head)
                    if (body.count(h)) return;
                gc.body.assign(body.begin(), body.end());
                gc.head.assign(head.begin(), head.end());
                theory.clauses.push_back(std::move(gc));
                return;
            }
            for (const auto& c : dom) {
                bind[vars[i]] = c;
                ground(i + 1);
            }
            bind.erase(vars[i]);
        };
        // A clause under a universal prefix is vacuous on the empty domain,
        // whether or not it mentions the quantified variables.
        if (dom.empty() && !phi.fo_vars.empty()) continue;
        if (vars.empty() || !dom.empty()) ground(0);
    }
    return theory_satisfiable(theory, {});
}

Program mmsnp_to_mddlog(const MMSNPSentence& phi) {
    return mmsnp_to_mddlog(phi, phi.edb_schema);
}

Program mmsnp_to_mddlog(const MMSNPSentence& phi, const Schema& schema) {
    Program p;
    p.goal = "goal";
    p.arity = 0;
    for (const auto& [r, k] : schema.relations) p.schema.declare(r, k);
    p.schema.declare("goal", 0);

    // One guessing rule per SO variable, EDB relation and argument position.
    for (const auto& x : phi.so_vars) {
        p.schema.declare("gen$" + x, 1);
        p.schema.declare("neg$" + x, 1);
        for (const auto& [rel, arity] : schema.relations) {
            for (int pos = 0; pos < arity; ++pos) {
                Rule r;
                Atom body{rel, {}};
                for (int i = 0; i < arity; ++i)
                    body.args.push_back(Term::var("V" + std::to_string(i + 1)));
                Term v = body.args[pos];
                r.body.push_back(std::move(body));
                r.head.push_back(Atom{"gen$" + x, {v}});
                r.head.push_back(Atom{"neg$" + x, {v}});
                p.rules.push_back(std::move(r));
            }
        }
    }

    std::set<std::string> so(phi.so_vars.begin(), phi.so_vars.end());
    for (const auto& clause : phi.clauses) {
        if (clause.alphas.empty() && clause.betas.empty()) {
            // `true -> false` fails exactly on instances with a nonempty
            // domain; any fact of positive arity witnesses that.
            for (const auto& [rel, arity] : schema.relations) {
                if (arity == 0) continue;
                Rule r;
                Atom body{rel, {}};
                for (int i = 0; i < arity; ++i)
                    body.args.push_back(Term::var("V" + std::to_string(i + 1)));
                r.body.push_back(std::move(body));
                r.head.push_back(Atom{"goal", {}});
                p.rules.push_back(std::move(r));
            }
            continue;
        }
        // Rename the clause's FO variables to parser-safe names.
        std::map<std::string, Term> rn;
        auto var_of = [&rn](const std::string& name) {
            auto it = rn.find(name);
            if (it == rn.end())
                it = rn.emplace(name, Term::var("V" + std::to_string(rn.size() + 1))).first;
            return it->second;
        };
        Rule r;
        for (const auto& a : clause.alphas) {
            Atom b{so.count(a.relation) ? "gen$" + a.relation : a.relation, {}};
            for (const auto& t : a.args) b.args.push_back(var_of(t.name));
            r.body.push_back(std::move(b));
        }
        for (const auto& a : clause.betas)
            r.body.push_back(Atom{"neg$" + a.relation, {var_of(a.args[0].name)}});
        r.head.push_back(Atom{"goal", {}});
        p.rules.push_back(std::move(r));
    }
    p.normalize();
    return p;
}

MMSNPSentence mddlog_to_mmsnp(const Program& p) {
    if (p.arity != 0) throw Error("mddlog_to_mmsnp: program not Boolean");
    MMSNPSentence phi;
    auto idb = p.idb_relations();
    for (const auto& rel : idb) {
        if (rel == p.goal) continue;
        if (p.schema.arity_of(rel) != 1)
            throw Error("mddlog_to_mmsnp: IDB relation " + rel + " is not unary");
        phi.so_vars.push_back(rel);
    }
    phi.edb_schema = p.edb_schema();

    std::set<std::string> so(phi.so_vars.begin(), phi.so_vars.end());
    std::set<std::string> fo_seen;
    std::size_t width = 0;
    for (const auto& r : p.rules) width = std::max(width, r.variables().size());
    std::vector<std::string> fo_names;
    for (std::size_t i = 1; fo_names.size() < width; ++i) {
        std::string cand = "x" + std::to_string(i);
        if (!so.count(cand)) fo_names.push_back(cand);
    }
    phi.fo_vars = fo_names;

    for (const auto& r : p.rules) {
        for (const auto& c : r.constants())
            throw Error("mddlog_to_mmsnp: constant " + c + " in a rule");
        std::map<std::string, Term> rn;
        auto var_of = [&](const std::string& name) {
            auto it = rn.find(name);
            if (it == rn.end()) it = rn.emplace(name, Term::var(fo_names[rn.size()])).first;
            return it->second;
        };
        MMSNPClause clause;
        for (const auto& a : r.body) {
            Atom alpha{a.relation, {}};
            for (const auto& t : a.args) alpha.args.push_back(var_of(t.name));
            clause.alphas.push_back(std::move(alpha));
        }
        bool is_goal_rule =
            r.head.size() == 1 && r.head.front().relation == p.goal;
        if (!is_goal_rule)
            for (const auto& a : r.head)
                clause.betas.push_back(Atom{a.relation, {var_of(a.args[0].name)}});
        phi.clauses.push_back(std::move(clause));
    }
    return phi;
}

}  // namespace mdc
