#include "mdc/simplify.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace mdc {

const ConsolidationEntry* ConsolidationMap::by_relation(const std::string& rel) const {
    for (const auto& [key, e] : entries)
        if (e.relation == rel) return &e;
    return nullptr;
}

Program close_under_identification(const Program& p) {
    Program out = p;
    for (const auto& r : p.rules) {
        auto var_set = r.variables();
        std::vector<std::string> vars(var_set.begin(), var_set.end());
        if (vars.size() > 8)
            throw LimitError("close_under_identification", "rule variables",
                             vars.size(), 8);
        // Enumerate set partitions: each variable joins an existing block or
        // opens a new one.
        std::vector<std::vector<int>> blocks;
        std::function<void()> emit = [&]() {
            std::map<std::string, std::string> subst;
            for (const auto& block : blocks) {
                std::string rep = vars[block.front()];
                for (int i : block) rep = std::min(rep, vars[i]);
                for (int i : block) subst[vars[i]] = rep;
            }
            Rule nr = r;
            for (auto* atoms : {&nr.head, &nr.body}) {
                for (auto& a : *atoms)
                    for (auto& t : a.args)
                        if (t.is_var()) t.name = subst.at(t.name);
                std::sort(atoms->begin(), atoms->end());
                atoms->erase(std::unique(atoms->begin(), atoms->end()), atoms->end());
            }
            out.rules.push_back(std::move(nr));
        };
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == vars.size()) {
                emit();
                return;
            }
            for (auto& block : blocks) {
                block.push_back((int)i);
                rec(i + 1);
                block.pop_back();
            }
            blocks.push_back({(int)i});
            rec(i + 1);
            blocks.pop_back();
        };
        rec(0);
    }
    out.normalize();
    return out;
}

namespace {

bool is_reflexive_edb(const Atom& a, const std::set<std::string>& edb) {
    if (!edb.count(a.relation) || a.args.size() < 2) return false;
    for (const auto& t : a.args)
        if (!t.is_var() || t.name != a.args[0].name) return false;
    return true;
}

// Head atoms distribute to the fragment holding their variable. Nullary head
// atoms (goal in particular) stay with the continuation fragment only, which
// keeps goal rules non-disjunctive.
std::vector<Atom> head_side(const std::vector<Atom>& head,
                            const std::set<std::string>& side_vars,
                            bool take_nullary) {
    std::vector<Atom> out;
    for (const auto& a : head) {
        if (a.args.empty()) {
            if (take_nullary) out.push_back(a);
            continue;
        }
        for (const auto& t : a.args)
            if (t.is_var() && side_vars.count(t.name)) {
                out.push_back(a);
                break;
            }
    }
    return out;
}

std::set<std::string> atoms_vars(const std::vector<Atom>& atoms) {
    std::set<std::string> out;
    for (const auto& a : atoms)
        for (const auto& t : a.args)
            if (t.is_var()) out.insert(t.name);
    return out;
}

// Variable-connected components over the given atoms; nullary atoms are
// skipped. Returns groups of atom indices ordered by smallest member atom.
std::vector<std::vector<int>> var_components(const std::vector<Atom>& atoms,
                                             const std::vector<int>& keep) {
    std::map<std::string, int> var_group;
    std::vector<int> parent(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) parent[i] = (int)i;
    std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t i = 0; i < keep.size(); ++i) {
        for (const auto& t : atoms[keep[i]].args) {
            if (!t.is_var()) continue;
            auto [it, fresh] = var_group.emplace(t.name, (int)i);
            if (!fresh) parent[find((int)i)] = find(it->second);
        }
    }
    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < keep.size(); ++i)
        groups[find((int)i)].push_back(keep[i]);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    std::sort(out.begin(), out.end(), [&atoms](const auto& a, const auto& b) {
        return atoms[a.front()] < atoms[b.front()];
    });
    return out;
}

struct BiconnectWorker {
    const std::set<std::string>& edb;
    Program& out;
    std::map<std::string, int>& registry;
    std::deque<Rule> queue;

    // Fresh relations are named by the canonical form of their defining
    // fragment, so equivalent fragments across rules (and across the two
    // programs of a pair) share one relation and the closure stays small.
    std::string fresh_for(const Rule& def_with_placeholder) {
        std::string key = canonical_rule_key(def_with_placeholder);
        auto [it, inserted] = registry.emplace(key, (int)registry.size());
        return "gen$q" + std::to_string(it->second);
    }

    void split_two(const Rule& r, const std::vector<Atom>& q1,
                   const std::vector<Atom>& q2, std::vector<Term> link_args) {
        Rule def;
        def.head = head_side(r.head, atoms_vars(q1), false);
        def.head.push_back(Atom{"gen$?", link_args});
        def.body = q1;
        Atom link{fresh_for(def), std::move(link_args)};
        out.schema.declare(link.relation, (int)link.args.size());
        def.head.back() = link;

        Rule r2;
        r2.head = head_side(r.head, atoms_vars(q2), true);
        r2.body = q2;
        r2.body.insert(r2.body.begin(), std::move(link));
        queue.push_back(std::move(def));
        queue.push_back(std::move(r2));
    }

    // Rule (b): variable-disjoint body parts, including nullary EDB atoms as
    // their own parts. Nullary IDB atoms ride with the continuation.
    bool try_disjoint(const Rule& r) {
        std::vector<int> var_atoms, nullary_edb, nullary_idb;
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            const Atom& a = r.body[i];
            if (!atom_variables(a).empty())
                var_atoms.push_back((int)i);
            else if (edb.count(a.relation))
                nullary_edb.push_back((int)i);
            else
                nullary_idb.push_back((int)i);
        }
        auto groups = var_components(r.body, var_atoms);
        std::size_t parts = groups.size() + nullary_edb.size();
        if (parts < 2) return false;

        std::vector<Atom> q1, q2;
        if (!groups.empty()) {
            for (int i : groups.front()) q1.push_back(r.body[i]);
            for (std::size_t g = 1; g < groups.size(); ++g)
                for (int i : groups[g]) q2.push_back(r.body[i]);
            for (int i : nullary_edb) q2.push_back(r.body[i]);
        } else {
            q1.push_back(r.body[nullary_edb.front()]);
            for (std::size_t g = 1; g < nullary_edb.size(); ++g)
                q2.push_back(r.body[nullary_edb[g]]);
        }
        for (int i : nullary_idb) q2.push_back(r.body[i]);
        split_two(r, q1, q2, {});
        return true;
    }

    // Rule (c): a reflexive EDB atom next to another EDB atom moves behind a
    // fresh monadic relation.
    bool try_reflexive(const Rule& r) {
        int reflexive = -1;
        int edb_count = 0;
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (edb.count(r.body[i].relation)) ++edb_count;
            if (reflexive < 0 && is_reflexive_edb(r.body[i], edb)) reflexive = (int)i;
        }
        if (reflexive < 0 || edb_count < 2) return false;
        const Atom& ra = r.body[reflexive];
        Rule def;
        def.head = {Atom{"gen$?", {ra.args[0]}}};
        def.body = {ra};
        Atom guard{fresh_for(def), {ra.args[0]}};
        out.schema.declare(guard.relation, 1);
        def.head = {guard};
        Rule rest = r;
        rest.body.erase(rest.body.begin() + reflexive);
        rest.body.insert(rest.body.begin(), guard);
        queue.push_back(std::move(def));
        queue.push_back(std::move(rest));
        return true;
    }

    // Rule (a): split at a variable x when the body parts glued only through x
    // fall apart, i.e. linking atoms by shared variables other than x leaves
    // at least two components that carry a variable besides x.
    bool try_cut(const Rule& r) {
        auto vars = r.variables();
        for (const auto& x : vars) {
            std::vector<int> var_atoms;
            for (std::size_t i = 0; i < r.body.size(); ++i)
                if (!atom_variables(r.body[i]).empty()) var_atoms.push_back((int)i);

            // Union-find over atoms, linking on non-x variables.
            std::vector<int> parent(var_atoms.size());
            for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = (int)i;
            std::function<int(int)> find = [&](int a) {
                return parent[a] == a ? a : parent[a] = find(parent[a]);
            };
            std::map<std::string, int> owner;
            for (std::size_t i = 0; i < var_atoms.size(); ++i)
                for (const auto& t : r.body[var_atoms[i]].args) {
                    if (!t.is_var() || t.name == x) continue;
                    auto [it, fresh_var] = owner.emplace(t.name, (int)i);
                    if (!fresh_var) parent[find((int)i)] = find(it->second);
                }
            std::map<int, std::vector<int>> comps;
            for (std::size_t i = 0; i < var_atoms.size(); ++i)
                comps[find((int)i)].push_back(var_atoms[i]);

            std::vector<std::vector<int>> rich;  // components with a non-x variable
            std::vector<int> x_only;
            for (auto& [root, members] : comps) {
                bool has_other = false;
                for (int i : members)
                    for (const auto& t : r.body[i].args)
                        if (t.is_var() && t.name != x) has_other = true;
                if (has_other)
                    rich.push_back(std::move(members));
                else
                    x_only.insert(x_only.end(), members.begin(), members.end());
            }
            if (rich.size() < 2) continue;
            std::sort(rich.begin(), rich.end(),
                      [&r](const auto& a, const auto& b) {
                          return r.body[a.front()] < r.body[b.front()];
                      });

            std::vector<Atom> q1, q2;
            for (int i : rich.front()) q1.push_back(r.body[i]);
            for (std::size_t g = 1; g < rich.size(); ++g)
                for (int i : rich[g]) q2.push_back(r.body[i]);
            std::sort(x_only.begin(), x_only.end());
            for (int i : x_only) q2.push_back(r.body[i]);
            for (const auto& a : r.body)
                if (atom_variables(a).empty()) q2.push_back(a);
            split_two(r, q1, q2, {Term::var(x)});
            return true;
        }
        return false;
    }

    void run(const Program& p) {
        for (const auto& r : p.rules) queue.push_back(r);
        while (!queue.empty()) {
            Rule r = std::move(queue.front());
            queue.pop_front();
            if (try_disjoint(r)) continue;
            if (try_reflexive(r)) continue;
            if (try_cut(r)) continue;
            out.rules.push_back(std::move(r));
        }
    }
};

}  // namespace

Program biconnect(const Program& p, std::map<std::string, int>& fresh_registry) {
    Program out;
    out.schema = p.schema;
    out.goal = p.goal;
    out.arity = p.arity;
    out.forced_idb = p.idb_relations();
    auto edb = p.edb_relations();
    BiconnectWorker worker{edb, out, fresh_registry, {}};
    worker.run(p);
    out.normalize();
    return out;
}

Program biconnect(const Program& p) {
    std::map<std::string, int> registry;
    return biconnect(p, registry);
}

namespace {

std::vector<Atom> edb_part(const Rule& r, const std::set<std::string>& edb) {
    std::vector<Atom> out;
    for (const auto& a : r.body)
        if (edb.count(a.relation)) out.push_back(a);
    return out;
}

std::vector<Atom> idb_part(const Rule& r, const std::set<std::string>& edb) {
    std::vector<Atom> out;
    for (const auto& a : r.body)
        if (!edb.count(a.relation)) out.push_back(a);
    return out;
}

// All injective variable maps from `from` into `to` preserving atoms.
std::set<std::map<std::string, std::string>> injective_homs(
    const std::vector<Atom>& from, const std::vector<Atom>& to) {
    std::set<std::map<std::string, std::string>> results;
    std::map<std::string, std::string> mapping;
    std::set<std::string> used;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == from.size()) {
            results.insert(mapping);
            return;
        }
        const Atom& a = from[i];
        for (const Atom& b : to) {
            if (b.relation != a.relation || b.args.size() != a.args.size()) continue;
            std::vector<std::string> added;
            bool ok = true;
            for (std::size_t k = 0; k < a.args.size() && ok; ++k) {
                const Term& s = a.args[k];
                const Term& t = b.args[k];
                if (!s.is_var()) {
                    ok = !t.is_var() && s.name == t.name;
                } else if (!t.is_var()) {
                    ok = false;  // variables map to variables
                } else if (auto it = mapping.find(s.name); it != mapping.end()) {
                    ok = it->second == t.name;
                } else if (used.count(t.name)) {
                    ok = false;  // injectivity
                } else {
                    mapping.emplace(s.name, t.name);
                    used.insert(t.name);
                    added.push_back(s.name);
                }
            }
            if (ok) rec(i + 1);
            for (const auto& v : added) {
                used.erase(mapping.at(v));
                mapping.erase(v);
            }
        }
    };
    rec(0);
    return results;
}

std::string fresh_var(const std::set<std::string>& taken, int& counter) {
    while (true) {
        std::string cand = "W" + std::to_string(counter++);
        if (!taken.count(cand)) return cand;
    }
}

}  // namespace

std::tuple<Program, Program, ConsolidationMap> consolidate(const Program& p1,
                                                           const Program& p2) {
    ConsolidationMap map;
    auto collect = [&map](const Program& p) {
        auto edb = p.edb_relations();
        for (const auto& r : p.rules) {
            auto part = edb_part(r, edb);
            if (part.empty()) continue;
            std::string key = canonical_cq(part);
            if (map.entries.count(key)) continue;
            Rule pseudo;
            pseudo.body = part;
            Rule canon = canonical_rule(pseudo);
            ConsolidationEntry e;
            e.cq = canon.body;
            e.arity = (int)atoms_vars(e.cq).size();
            for (int i = 0; i < e.arity; ++i) e.vars.push_back("V" + std::to_string(i));
            map.entries.emplace(key, std::move(e));
        }
    };
    collect(p1);
    collect(p2);
    int n = 0;
    for (auto& [key, e] : map.entries) e.relation = "edb$q" + std::to_string(n++);

    Schema edb_schema;
    for (const auto& [key, e] : map.entries) edb_schema.declare(e.relation, e.arity);

    auto rewrite = [&](const Program& p) {
        Program out;
        out.goal = p.goal;
        out.arity = p.arity;
        out.forced_idb = p.idb_relations();
        out.schema = edb_schema;
        for (const auto& rel : p.idb_relations())
            if (p.schema.contains(rel)) out.schema.declare(rel, p.schema.arity_of(rel));
        if (!out.schema.contains(p.goal)) out.schema.declare(p.goal, p.arity);
        auto edb = p.edb_relations();
        for (const auto& r : p.rules) {
            auto part = edb_part(r, edb);
            if (part.empty()) {
                out.rules.push_back(r);
                continue;
            }
            auto idbs = idb_part(r, edb);
            for (const auto& [key, e] : map.entries) {
                for (const auto& h : injective_homs(part, e.cq)) {
                    Rule nr;
                    nr.head = r.head;
                    Atom guard{e.relation, {}};
                    std::map<std::string, std::string> inv;
                    for (const auto& [src, dst] : h) inv[dst] = src;
                    auto taken = r.variables();
                    int counter = 0;
                    for (const auto& v : e.vars) {
                        auto it = inv.find(v);
                        if (it != inv.end()) {
                            guard.args.push_back(Term::var(it->second));
                        } else {
                            std::string w = fresh_var(taken, counter);
                            taken.insert(w);
                            guard.args.push_back(Term::var(w));
                        }
                    }
                    nr.body.push_back(std::move(guard));
                    for (const auto& a : idbs) nr.body.push_back(a);
                    out.rules.push_back(std::move(nr));
                }
            }
        }
        out.normalize();
        return out;
    };
    return {rewrite(p1), rewrite(p2), std::move(map)};
}

SimplifyResult simplify_pair(const Program& p1, const Program& p2) {
    if (p1.arity != 0 || p2.arity != 0)
        throw Error("simplify_pair: programs must be Boolean");
    SimplifyResult res;
    Metrics m1 = compute_metrics(p1), m2 = compute_metrics(p2);
    res.atom_width = std::max(m1.atom_width, m2.atom_width);
    Program c1 = close_under_identification(p1);
    Program c2 = close_under_identification(p2);
    std::map<std::string, int> registry;
    Program b1 = biconnect(c1, registry);
    Program b2 = biconnect(c2, registry);
    std::tie(res.left, res.right, res.map) = consolidate(b1, b2);
    return res;
}

Instance to_consolidated(const Instance& instance, const ConsolidationMap& map) {
    Instance out;
    for (const auto& [key, e] : map.entries) {
        out.schema.declare(e.relation, e.arity);
        ConjunctiveQuery q;
        q.answer_vars = e.vars;
        q.atoms = e.cq;
        for (const auto& tuple : eval_cq(q, instance)) {
            Atom f{e.relation, {}};
            for (const auto& c : tuple) f.args.push_back(Term::cst(c));
            out.facts.insert(std::move(f));
        }
    }
    return out;
}

Instance from_consolidated(const Instance& instance, const ConsolidationMap& map,
                           const Schema& original_edb) {
    Instance out;
    out.schema = original_edb;
    for (const auto& f : instance.facts) {
        const ConsolidationEntry* e = map.by_relation(f.relation);
        if (!e) throw Error("from_consolidated: unknown relation " + f.relation);
        std::map<std::string, std::string> bind;
        for (int i = 0; i < e->arity; ++i) bind[e->vars[i]] = f.args[i].name;
        for (const auto& a : e->cq) {
            Atom fact{a.relation, {}};
            for (const auto& t : a.args)
                fact.args.push_back(Term::cst(t.is_var() ? bind.at(t.name) : t.name));
            out.facts.insert(std::move(fact));
        }
    }
    return out;
}

}  // namespace mdc
