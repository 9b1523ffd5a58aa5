#include "mdc/boolify.hpp"

#include <algorithm>
#include <functional>

namespace mdc {

std::vector<std::string> constant_pool(const Program& p1, const Program& p2) {
    std::set<std::string> pool;
    for (const Program* p : {&p1, &p2})
        for (const auto& r : p->rules)
            for (const auto& c : r.constants()) pool.insert(c);
    int arity = std::max(p1.arity, p2.arity);
    for (int i = 1; i <= arity; ++i) pool.insert("fresh$" + std::to_string(i));
    return {pool.begin(), pool.end()};
}

std::vector<ConstantTuple> constant_tuples(const Program& p1, const Program& p2) {
    auto pool = constant_pool(p1, p2);
    int k = p1.arity;
    std::vector<ConstantTuple> out;
    ConstantTuple t;
    t.constants.resize(k);
    std::function<void(int)> rec = [&](int i) {
        if (i == k) {
            out.push_back(t);
            return;
        }
        for (const auto& c : pool) {
            t.constants[i] = c;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

Program specialize_goal(const Program& p, const ConstantTuple& tuple) {
    if ((int)tuple.constants.size() != p.arity)
        throw Error("specialize_goal: tuple arity mismatch");
    Program out;
    out.goal = p.goal;
    out.arity = 0;
    out.forced_idb = p.idb_relations();
    for (const auto& [rel, k] : p.schema.relations)
        if (rel != p.goal) out.schema.declare(rel, k);
    out.schema.declare(p.goal, 0);

    for (const auto& r : p.rules) {
        bool is_goal = !r.head.empty() && r.head.front().relation == p.goal;
        if (!is_goal) {
            out.rules.push_back(r);
            continue;
        }
        const Atom& head = r.head.front();
        std::map<std::string, std::string> subst;
        bool keep = true;
        for (std::size_t i = 0; i < head.args.size() && keep; ++i) {
            const Term& t = head.args[i];
            const std::string& target = tuple.constants[i];
            if (!t.is_var()) {
                keep = t.name == target;
            } else if (auto [it, fresh] = subst.emplace(t.name, target); !fresh) {
                keep = it->second == target;  // x_i = x_j needs a_i = a_j
            }
        }
        if (!keep) continue;
        Rule nr;
        nr.head = {Atom{p.goal, {}}};
        nr.body = r.body;
        for (auto& a : nr.body)
            for (auto& t : a.args)
                if (t.is_var())
                    if (auto it = subst.find(t.name); it != subst.end())
                        t = Term::cst(it->second);
        out.rules.push_back(std::move(nr));
    }
    return out;
}

std::vector<BooleanBranch> strip_answer_vars(const Program& p1, const Program& p2) {
    if (p1.arity != p2.arity) throw Error("strip_answer_vars: arity mismatch");
    std::vector<BooleanBranch> out;
    for (const auto& t : constant_tuples(p1, p2))
        out.push_back({t, specialize_goal(p1, t), specialize_goal(p2, t)});
    return out;
}

namespace {

std::string fresh_var_name(std::set<std::string>& taken, int& counter) {
    while (true) {
        std::string cand = "C" + std::to_string(counter++);
        if (taken.insert(cand).second) return cand;
    }
}

Program eliminate_in(const Program& p, const std::vector<std::string>& pool,
                     bool add_clash_rules) {
    Program out;
    out.goal = p.goal;
    out.arity = 0;
    out.forced_idb = p.idb_relations();
    out.schema = p.schema;
    for (const auto& c : pool) out.schema.declare("cst$" + c, 1);

    for (const auto& r : p.rules) {
        auto var_set = r.variables();
        std::vector<std::string> vars(var_set.begin(), var_set.end());
        auto const_set = r.constants();
        std::vector<std::string> consts(const_set.begin(), const_set.end());

        // delta: every constant to its marker, each variable optionally to
        // any marker. Index -1 leaves the variable unmapped.
        std::vector<int> var_choice(vars.size(), -1);
        std::function<void(std::size_t)> choose = [&](std::size_t vi) {
            if (vi < vars.size()) {
                for (int c = -1; c < (int)pool.size(); ++c) {
                    var_choice[vi] = c;
                    choose(vi + 1);
                }
                var_choice[vi] = -1;
                return;
            }
            std::map<std::string, std::string> delta;  // term -> pool constant
            for (const auto& c : consts) delta[c] = c;
            for (std::size_t i = 0; i < vars.size(); ++i)
                if (var_choice[i] >= 0) delta[vars[i]] = pool[var_choice[i]];

            auto term_key = [](const Term& t) { return t.name; };
            std::set<std::string> taken = var_set;
            int counter = 0;

            // Body: every occurrence of a mapped term becomes its own fresh
            // variable, guarded by the marker relation.
            std::map<std::string, std::vector<std::string>> introduced;
            Rule base;
            base.body.reserve(r.body.size());
            for (const auto& a : r.body) {
                Atom na{a.relation, {}};
                for (const auto& t : a.args) {
                    auto it = delta.find(term_key(t));
                    if (it == delta.end()) {
                        na.args.push_back(t);
                    } else {
                        std::string v = fresh_var_name(taken, counter);
                        introduced[it->first].push_back(v);
                        na.args.push_back(Term::var(v));
                    }
                }
                base.body.push_back(std::move(na));
            }
            // Mapped terms occurring only in the head still need one guarded
            // variable to stand for them.
            for (const auto& a : r.head)
                for (const auto& t : a.args) {
                    auto it = delta.find(term_key(t));
                    if (it != delta.end() && !introduced.count(it->first))
                        introduced[it->first].push_back(fresh_var_name(taken, counter));
                }
            for (const auto& [term, fresh_vars] : introduced)
                for (const auto& v : fresh_vars)
                    base.body.push_back(Atom{"cst$" + delta.at(term), {Term::var(v)}});

            // Head: each occurrence picks one of the introduced variables;
            // emit every choice.
            std::vector<std::pair<std::size_t, std::size_t>> head_slots;  // atom, arg
            for (std::size_t ai = 0; ai < r.head.size(); ++ai)
                for (std::size_t k = 0; k < r.head[ai].args.size(); ++k)
                    if (delta.count(term_key(r.head[ai].args[k])))
                        head_slots.push_back({ai, k});
            std::vector<Atom> head = r.head;
            std::function<void(std::size_t)> pick = [&](std::size_t si) {
                if (si == head_slots.size()) {
                    Rule nr;
                    nr.head = head;
                    nr.body = base.body;
                    out.rules.push_back(std::move(nr));
                    return;
                }
                auto [ai, k] = head_slots[si];
                const std::string& term = term_key(r.head[ai].args[k]);
                for (const auto& v : introduced.at(term)) {
                    head[ai].args[k] = Term::var(v);
                    pick(si + 1);
                }
                head[ai].args[k] = r.head[ai].args[k];
            };
            pick(0);
        };
        choose(0);
    }

    if (add_clash_rules) {
        for (std::size_t i = 0; i < pool.size(); ++i)
            for (std::size_t j = i + 1; j < pool.size(); ++j) {
                Rule clash;
                clash.head = {Atom{p.goal, {}}};
                clash.body = {Atom{"cst$" + pool[i], {Term::var("X")}},
                              Atom{"cst$" + pool[j], {Term::var("X")}}};
                out.rules.push_back(std::move(clash));
            }
    }
    out.normalize();
    return out;
}

}  // namespace

std::pair<Program, Program> eliminate_constants(const Program& p1, const Program& p2) {
    if (p1.arity != 0 || p2.arity != 0)
        throw Error("eliminate_constants: programs must be Boolean");
    std::set<std::string> pool_set;
    for (const Program* p : {&p1, &p2})
        for (const auto& r : p->rules)
            for (const auto& c : r.constants()) pool_set.insert(c);
    std::vector<std::string> pool(pool_set.begin(), pool_set.end());
    if (pool.empty()) return {p1, p2};
    return {eliminate_in(p1, pool, false), eliminate_in(p2, pool, true)};
}

Instance with_constant_marks(const Instance& instance,
                             const std::set<std::string>& constants) {
    Instance out = instance;
    for (const auto& a : instance.adom())
        if (constants.count(a)) out.add_fact(Atom{"cst$" + a, {Term::cst(a)}});
    for (const auto& c : constants)
        out.schema.declare("cst$" + c, 1);
    return out;
}

Instance quotient_marked(const Instance& instance) {
    std::map<std::string, std::string> rep;
    for (const auto& f : instance.facts) {
        if (f.relation.rfind("cst$", 0) != 0) continue;
        const std::string mark = f.relation.substr(4);
        const std::string& elem = f.args.front().name;
        auto [it, fresh] = rep.emplace(elem, mark);
        if (!fresh && it->second != mark)
            throw Error("quotient_marked: element " + elem + " carries two marks");
    }
    Instance out;
    for (const auto& [rel, k] : instance.schema.relations)
        if (rel.rfind("cst$", 0) != 0) out.schema.declare(rel, k);
    for (const auto& f : instance.facts) {
        if (f.relation.rfind("cst$", 0) == 0) continue;
        Atom nf{f.relation, {}};
        for (const auto& t : f.args) {
            auto it = rep.find(t.name);
            nf.args.push_back(Term::cst(it == rep.end() ? t.name : it->second));
        }
        out.facts.insert(std::move(nf));
    }
    return out;
}

}  // namespace mdc
