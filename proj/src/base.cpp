#include "mdc/base.hpp"

#include <algorithm>
#include <numeric>

namespace mdc {

bool Atom::ground() const {
    for (const auto& t : args)
        if (t.is_var()) return false;
    return true;
}

std::set<std::string> atom_variables(const Atom& a) {
    std::set<std::string> out;
    for (const auto& t : a.args)
        if (t.is_var()) out.insert(t.name);
    return out;
}

std::set<std::string> Rule::variables() const {
    std::set<std::string> out;
    for (const auto& a : head)
        for (const auto& t : a.args)
            if (t.is_var()) out.insert(t.name);
    for (const auto& a : body)
        for (const auto& t : a.args)
            if (t.is_var()) out.insert(t.name);
    return out;
}

std::set<std::string> Rule::constants() const {
    std::set<std::string> out;
    for (const auto& a : head)
        for (const auto& t : a.args)
            if (!t.is_var()) out.insert(t.name);
    for (const auto& a : body)
        for (const auto& t : a.args)
            if (!t.is_var()) out.insert(t.name);
    return out;
}

int Schema::arity_of(const std::string& r) const {
    auto it = relations.find(r);
    if (it == relations.end()) throw Error("unknown relation: " + r);
    return it->second;
}

void Schema::declare(const std::string& r, int arity) {
    auto [it, inserted] = relations.emplace(r, arity);
    if (!inserted && it->second != arity)
        throw Error("arity mismatch for relation " + r + ": " +
                    std::to_string(it->second) + " vs " + std::to_string(arity));
}

Schema Schema::merged(const Schema& a, const Schema& b) {
    Schema out = a;
    for (const auto& [r, k] : b.relations) out.declare(r, k);
    return out;
}

std::set<std::string> Program::idb_relations() const {
    std::set<std::string> out = forced_idb;
    out.insert(goal);
    for (const auto& r : rules)
        for (const auto& a : r.head) out.insert(a.relation);
    return out;
}

std::set<std::string> Program::edb_relations() const {
    auto idb = idb_relations();
    std::set<std::string> out;
    for (const auto& [r, k] : schema.relations)
        if (!idb.count(r)) out.insert(r);
    return out;
}

Schema Program::edb_schema() const {
    Schema out;
    for (const auto& r : edb_relations()) out.declare(r, schema.arity_of(r));
    return out;
}

void Program::add_rule(Rule r) {
    for (const auto& a : r.head) schema.declare(a.relation, (int)a.args.size());
    for (const auto& a : r.body) schema.declare(a.relation, (int)a.args.size());
    rules.push_back(std::move(r));
}

void Program::normalize() {
    std::map<std::string, Rule> by_key;
    for (auto& r : rules) by_key.emplace(canonical_rule_key(r), std::move(r));
    rules.clear();
    for (auto& [key, r] : by_key) rules.push_back(std::move(r));
}

std::set<std::string> Instance::adom() const {
    std::set<std::string> out;
    for (const auto& f : facts)
        for (const auto& t : f.args) out.insert(t.name);
    return out;
}

void Instance::add_fact(Atom a) {
    if (!a.ground()) throw Error("instance fact must be ground: " + a.relation);
    schema.declare(a.relation, (int)a.args.size());
    facts.insert(std::move(a));
}

Metrics compute_metrics(const Program& p) {
    Metrics m;
    for (const auto& r : p.rules) {
        std::uint64_t rs = 0, atoms = 0;
        for (const auto& a : r.head) rs += 1 + a.args.size();
        for (const auto& a : r.body) {
            rs += 1 + a.args.size();
            ++atoms;
        }
        rs += 1;  // the arrow
        m.size += rs;
        m.rule_size = std::max(m.rule_size, rs);
        m.atom_width = std::max(m.atom_width, atoms);
        m.variable_width = std::max(m.variable_width, (std::uint64_t)r.variables().size());
    }
    return m;
}

ValidationReport validate_program(const Program& p) {
    ValidationReport rep;
    rep.mddlog = true;
    auto bad = [&rep](std::string msg) { rep.violations.push_back(std::move(msg)); };

    for (const auto& [r, k] : p.schema.relations)
        if (k < 0) bad("negative arity for relation " + r);

    auto idb = p.idb_relations();
    int goal_arity = -1;
    for (const auto& r : p.rules) {
        if (r.body.empty()) bad("rule with empty body");
        std::set<std::string> body_vars;
        for (const auto& a : r.body) {
            if ((int)a.args.size() != p.schema.arity_of(a.relation))
                bad("arity mismatch in body atom " + a.relation);
            if (a.relation == p.goal) bad("goal relation occurs in a rule body");
            for (const auto& t : a.args)
                if (t.is_var()) body_vars.insert(t.name);
        }
        bool has_goal_head = false;
        for (const auto& a : r.head) {
            if ((int)a.args.size() != p.schema.arity_of(a.relation))
                bad("arity mismatch in head atom " + a.relation);
            if (a.relation == p.goal) {
                has_goal_head = true;
                if (goal_arity < 0)
                    goal_arity = (int)a.args.size();
                else if (goal_arity != (int)a.args.size())
                    bad("goal rules disagree on arity");
            }
            for (const auto& t : a.args)
                if (t.is_var() && !body_vars.count(t.name))
                    bad("head variable " + t.name + " does not occur in the body");
        }
        if (has_goal_head && r.head.size() > 1)
            bad("goal relation occurs in a disjunctive head");
    }
    if (goal_arity >= 0 && goal_arity != p.arity)
        bad("program arity " + std::to_string(p.arity) +
            " differs from goal arity " + std::to_string(goal_arity));

    for (const auto& r : idb) {
        if (r == p.goal) continue;
        if (p.schema.contains(r) && p.schema.arity_of(r) > 1) {
            rep.mddlog = false;
            bad("non-goal IDB relation " + r + " has arity > 1");
        }
    }

    rep.metrics = compute_metrics(p);
    rep.ok = rep.violations.empty();
    return rep;
}

namespace {

// Renders atoms under a fixed variable numbering; unnumbered variables make the
// rendering incomparable so callers only pass complete numberings.
std::string render_with(const std::vector<Atom>& atoms,
                        const std::map<std::string, int>& order) {
    std::vector<std::string> parts;
    parts.reserve(atoms.size());
    for (const auto& a : atoms) {
        std::string s = a.relation;
        s += '(';
        bool first = true;
        for (const auto& t : a.args) {
            if (!first) s += ',';
            first = false;
            if (t.is_var())
                s += 'v' + std::to_string(order.at(t.name));
            else
                s += 'c' + t.name;
        }
        s += ')';
        parts.push_back(std::move(s));
    }
    // Conjunctions and disjunctions are sets of atoms.
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    std::string out;
    for (const auto& s : parts) {
        out += s;
        out += ';';
    }
    return out;
}

std::string minimize_over_orderings(const std::vector<Atom>& body,
                                    const std::vector<Atom>& head) {
    std::vector<std::string> vars;
    {
        std::set<std::string> seen;
        auto scan = [&](const std::vector<Atom>& atoms) {
            for (const auto& a : atoms)
                for (const auto& t : a.args)
                    if (t.is_var() && seen.insert(t.name).second) vars.push_back(t.name);
        };
        scan(body);
        scan(head);
    }
    if (vars.size() > 12)
        throw LimitError("canonical_cq", "variables", vars.size(), 12);

    std::vector<int> perm(vars.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::string best;
    bool have_best = false;
    do {
        std::map<std::string, int> order;
        for (size_t i = 0; i < vars.size(); ++i) order[vars[perm[i]]] = (int)i;
        std::string s = render_with(body, order);
        if (!head.empty()) {
            s += '|';
            s += render_with(head, order);
        }
        if (!have_best || s < best) {
            best = std::move(s);
            have_best = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

std::string canonical_cq(const std::vector<Atom>& body) {
    return minimize_over_orderings(body, {});
}

std::string canonical_rule_key(const Rule& r) {
    return minimize_over_orderings(r.body, r.head.empty()
                                               ? std::vector<Atom>{Atom{"$bot", {}}}
                                               : r.head);
}

Rule canonical_rule(const Rule& r) {
    // Recover the minimizing ordering by re-running the search.
    std::vector<std::string> vars;
    {
        std::set<std::string> seen;
        for (const auto& a : r.body)
            for (const auto& t : a.args)
                if (t.is_var() && seen.insert(t.name).second) vars.push_back(t.name);
        for (const auto& a : r.head)
            for (const auto& t : a.args)
                if (t.is_var() && seen.insert(t.name).second) vars.push_back(t.name);
    }
    if (vars.size() > 12)
        throw LimitError("canonical_cq", "variables", vars.size(), 12);

    std::vector<int> perm(vars.size()), best_perm(vars.size());
    std::iota(perm.begin(), perm.end(), 0);
    best_perm = perm;
    std::string best;
    bool have_best = false;
    do {
        std::map<std::string, int> order;
        for (size_t i = 0; i < vars.size(); ++i) order[vars[perm[i]]] = (int)i;
        std::string s = render_with(r.body, order) + "|" + render_with(r.head, order);
        if (!have_best || s < best) {
            best = std::move(s);
            best_perm = perm;
            have_best = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::map<std::string, std::string> rename;
    for (size_t i = 0; i < vars.size(); ++i)
        rename[vars[best_perm[i]]] = "V" + std::to_string(i);
    Rule out = r;
    auto apply = [&rename](std::vector<Atom>& atoms) {
        for (auto& a : atoms)
            for (auto& t : a.args)
                if (t.is_var()) t.name = rename.at(t.name);
        std::sort(atoms.begin(), atoms.end());
        atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    };
    apply(out.body);
    apply(out.head);
    return out;
}

namespace {

bool rule_is_simple(const Rule& r, const std::set<std::string>& edb) {
    std::vector<const Atom*> edb_atoms;
    std::set<std::string> body_vars;
    for (const auto& a : r.body) {
        if (edb.count(a.relation)) edb_atoms.push_back(&a);
        for (const auto& t : a.args)
            if (t.is_var()) body_vars.insert(t.name);
    }
    if (edb_atoms.empty()) return body_vars.size() <= 1;
    if (edb_atoms.size() > 1) return false;
    const Atom& e = *edb_atoms.front();
    std::map<std::string, int> occ;
    for (const auto& t : e.args) {
        if (!t.is_var()) return false;
        occ[t.name]++;
    }
    if (occ.size() != body_vars.size()) return false;
    for (const auto& [v, n] : occ)
        if (n != 1 || !body_vars.count(v)) return false;
    return true;
}

}  // namespace

bool is_simple(const Program& p) {
    auto edb = p.edb_relations();
    for (const auto& r : p.rules)
        if (!rule_is_simple(r, edb)) return false;
    return true;
}

bool is_semi_simple(const Program& p, const std::vector<Rule>& disjointness_rules) {
    auto edb = p.edb_relations();
    for (const auto& r : disjointness_rules)
        for (const auto& a : r.body) edb.erase(a.relation);
    for (const auto& r : p.rules)
        if (!rule_is_simple(r, edb)) return false;
    return true;
}

bool reserved_name(const std::string& name) {
    for (const char* prefix : {"gen$", "edb$", "neg$", "cst$", "p2$", "fresh$", "query$"})
        if (name.rfind(prefix, 0) == 0) return true;
    return false;
}

}  // namespace mdc
