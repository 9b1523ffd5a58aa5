#include "mdc/emptiness.hpp"

#include <algorithm>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mdc {

namespace {

std::vector<std::set<std::string>> subsets_avoiding(
    const std::set<std::string>& universe,
    const std::vector<std::set<std::string>>& forbidden) {
    if (universe.size() > 20)
        throw LimitError("types", "disjointness relations", universe.size(), 20);
    std::vector<std::string> rels(universe.begin(), universe.end());
    std::vector<std::set<std::string>> out;
    for (std::uint64_t mask = 0; mask < (1ull << rels.size()); ++mask) {
        std::set<std::string> t;
        for (std::size_t i = 0; i < rels.size(); ++i)
            if (mask & (1ull << i)) t.insert(rels[i]);
        bool ok = true;
        for (const auto& f : forbidden)
            if (!f.empty() && std::includes(t.begin(), t.end(), f.begin(), f.end())) {
                ok = false;
                break;
            }
        if (ok) out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::set<std::string>> forbidden_sets(const DisjointnessSet& d, int arity) {
    std::vector<std::set<std::string>> out;
    for (const auto& r : d.rules) {
        if (r.body.empty() || (int)r.body.front().args.size() != arity) continue;
        std::set<std::string> f;
        for (const auto& a : r.body) f.insert(a.relation);
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

std::vector<ZeroType> zero_types(const DisjointnessSet& d) {
    std::vector<ZeroType> out;
    for (auto& t : subsets_avoiding(d.relations(0), forbidden_sets(d, 0)))
        out.push_back(ZeroType{std::move(t)});
    return out;
}

std::vector<OneType> one_types(const DisjointnessSet& d) {
    return subsets_avoiding(d.relations(1), forbidden_sets(d, 1));
}

Instance build_k_theta(const Schema& edb_schema, const DisjointnessSet& d,
                       const ZeroType& theta, const EmptinessOptions& opts) {
    auto types = one_types(d);
    if (types.size() > opts.max_elements)
        throw LimitError("build_k_theta", "elements", types.size(), opts.max_elements);
    auto sigma_d = d.relations();

    Instance out;
    out.schema = edb_schema;
    std::vector<std::string> elems;
    for (std::size_t i = 0; i < types.size(); ++i) {
        elems.push_back("t" + std::to_string(i));
        for (const auto& rel : types[i])
            out.add_fact(Atom{rel, {Term::cst(elems.back())}});
    }
    for (const auto& rel : theta.relations) out.add_fact(Atom{rel, {}});

    std::uint64_t budget = 4'000'000;
    for (const auto& [rel, arity] : edb_schema.relations) {
        if (sigma_d.count(rel)) continue;
        std::uint64_t count = 1;
        for (int i = 0; i < arity; ++i) {
            count *= elems.size();
            if (count > budget)
                throw LimitError("build_k_theta", "facts", count, budget);
        }
        budget -= count;
        std::vector<int> odo(arity, 0);
        while (true) {
            Atom f{rel, {}};
            for (int i = 0; i < arity; ++i) f.args.push_back(Term::cst(elems[odo[i]]));
            out.facts.insert(std::move(f));
            int i = arity - 1;
            while (i >= 0 && ++odo[i] == (int)elems.size()) odo[i--] = 0;
            if (i < 0) break;
        }
    }
    return out;
}

namespace {

EmptinessResult check_empty_impl(const Program& p, const DisjointnessSet& d,
                                 const EmptinessOptions& opts, bool parallel) {
    if (!is_semi_simple(p, d.rules))
        throw Error("check_empty: program not semi-simple w.r.t. the constraints");
    auto thetas = zero_types(d);
    auto types = one_types(d);
    if (types.size() > opts.max_elements)
        throw LimitError("check_empty", "elements", types.size(), opts.max_elements);
    auto sigma_d = d.relations();

    // The shared explicit part: one element per 1-type with its unary facts.
    Instance base;
    std::vector<std::string> elems;
    for (std::size_t i = 0; i < types.size(); ++i) {
        elems.push_back("t" + std::to_string(i));
        for (const auto& rel : types[i])
            base.add_fact(Atom{rel, {Term::cst(elems.back())}});
    }
    std::set<std::string> full;
    for (const auto& rel : p.edb_relations())
        if (!sigma_d.count(rel)) full.insert(rel);

    const int n = (int)thetas.size();
    std::vector<signed char> holds(n, 0);
    std::vector<std::string> errors(n);

    auto run_one = [&](int i) {
        try {
            Instance inst = base;
            for (const auto& rel : thetas[i].relations) inst.add_fact(Atom{rel, {}});
            FactSource src;
            src.facts = &inst;
            src.full_relations = full;
            src.domain = elems;
            holds[i] = ddlog_holds(p, src, opts.eval) ? 1 : 0;
        } catch (const Error& e) {
            errors[i] = e.what();
            holds[i] = 2;
        }
    };

#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) run_one(i);
    } else {
        for (int i = 0; i < n; ++i) run_one(i);
    }
#else
    (void)parallel;
    for (int i = 0; i < n; ++i) run_one(i);
#endif

    for (int i = 0; i < n; ++i)
        if (holds[i] == 2) throw Error(errors[i]);

    EmptinessResult res;
    for (int i = 0; i < n; ++i) {
        if (holds[i] != 1) continue;
        res.empty = false;
        res.witness_theta = thetas[i];
        try {
            res.witness_k_theta = build_k_theta(p.edb_schema(), d, thetas[i], opts);
        } catch (const LimitError&) {
            // Witness instance beyond materialization range; the 0-type is
            // still reported.
        }
        break;
    }
    return res;
}

}  // namespace

EmptinessResult check_empty(const Program& p, const DisjointnessSet& d,
                            const EmptinessOptions& opts) {
    return check_empty_impl(p, d, opts, opts.parallel);
}

EmptinessResult check_empty_serial(const Program& p, const DisjointnessSet& d,
                                   const EmptinessOptions& opts) {
    return check_empty_impl(p, d, opts, false);
}

namespace {

struct SigmaTypes {
    std::set<std::string> unary, nullary;  // of Sigma_I union Sigma_D, no goal
};

SigmaTypes sigma_of(const Program& p, const DisjointnessSet& d) {
    SigmaTypes s;
    auto add = [&](const std::string& rel, int arity) {
        if (rel == p.goal) return;
        if (arity == 0)
            s.nullary.insert(rel);
        else if (arity == 1)
            s.unary.insert(rel);
        else
            throw Error("sigma type relation " + rel + " has arity > 1");
    };
    for (const auto& rel : p.idb_relations())
        if (rel != p.goal) add(rel, p.schema.arity_of(rel));
    for (const auto& r : d.rules)
        for (const auto& a : r.body) add(a.relation, (int)a.args.size());
    return s;
}

bool mentions_only_sigma(const Rule& r, const SigmaTypes& s, const std::string& goal) {
    for (const auto& a : r.body)
        if (!s.unary.count(a.relation) && !s.nullary.count(a.relation) &&
            a.relation != goal)
            return false;
    return true;
}

bool type_satisfies(const std::set<std::string>& t, const Rule& r) {
    for (const auto& a : r.body)
        if (!t.count(a.relation)) return true;
    for (const auto& a : r.head)
        if (t.count(a.relation)) return true;
    return false;
}

}  // namespace

std::vector<Instance> build_templates(const Program& p, const DisjointnessSet& d,
                                      const ZeroType& theta,
                                      const EmptinessOptions& opts) {
    if (!is_semi_simple(p, d.rules))
        throw Error("build_templates: program not semi-simple w.r.t. the constraints");
    SigmaTypes sigma = sigma_of(p, d);
    auto sigma_d = d.relations();
    auto theta_d_nullary = [&] {
        std::set<std::string> out;
        for (const auto& rel : sigma.nullary)
            if (sigma_d.count(rel)) out.insert(rel);
        return out;
    }();

    std::vector<std::string> nullary(sigma.nullary.begin(), sigma.nullary.end());
    std::vector<std::string> unary(sigma.unary.begin(), sigma.unary.end());
    if (unary.size() > 20 || nullary.size() > 20)
        throw LimitError("build_templates", "sigma relations",
                         std::max(unary.size(), nullary.size()), 20);

    std::vector<const Rule*> sigma_rules, nullary_rules;
    for (const auto& r : p.rules) {
        if (!mentions_only_sigma(r, sigma, p.goal)) continue;
        bool head_ok = true;  // a goal head disjunct can never enter a type
        sigma_rules.push_back(&r);
        bool all_nullary = head_ok;
        for (const auto& a : r.body)
            if (!a.args.empty()) all_nullary = false;
        for (const auto& a : r.head)
            if (!a.args.empty()) all_nullary = false;
        if (all_nullary) nullary_rules.push_back(&r);
    }

    std::vector<Instance> out;
    for (std::uint64_t dmask = 0; dmask < (1ull << nullary.size()); ++dmask) {
        std::set<std::string> delta;
        for (std::size_t i = 0; i < nullary.size(); ++i)
            if (dmask & (1ull << i)) delta.insert(nullary[i]);
        // Must agree with theta on the disjointness relations.
        {
            std::set<std::string> dn;
            for (const auto& rel : delta)
                if (sigma_d.count(rel)) dn.insert(rel);
            if (dn != theta.relations) continue;
        }
        bool ok = true;
        for (const Rule* r : nullary_rules)
            if (!type_satisfies(delta, *r)) {
                ok = false;
                break;
            }
        if (!ok) continue;

        // Elements: types over Sigma compatible with delta.
        std::vector<std::set<std::string>> types;
        if ((1ull << unary.size()) > opts.max_elements)
            throw LimitError("build_templates", "elements", 1ull << unary.size(),
                             opts.max_elements);
        for (std::uint64_t umask = 0; umask < (1ull << unary.size()); ++umask) {
            std::set<std::string> t = delta;
            for (std::size_t i = 0; i < unary.size(); ++i)
                if (umask & (1ull << i)) t.insert(unary[i]);
            bool sat = true;
            for (const Rule* r : sigma_rules)
                if (!type_satisfies(t, *r)) {
                    sat = false;
                    break;
                }
            if (sat) types.push_back(std::move(t));
        }

        Instance tpl;
        tpl.schema = p.edb_schema();
        std::vector<std::string> elems;
        for (std::size_t i = 0; i < types.size(); ++i) {
            elems.push_back("s" + std::to_string(i));
            for (const auto& rel : types[i])
                if (sigma_d.count(rel))
                    tpl.add_fact(Atom{rel, {Term::cst(elems.back())}});
        }
        for (const auto& rel : delta)
            if (sigma_d.count(rel)) tpl.add_fact(Atom{rel, {}});

        // Facts over the relations outside the disjointness schema, excluded
        // exactly when some rule is violated pointwise.
        for (const auto& [rel, arity] : tpl.schema.relations) {
            if (sigma_d.count(rel)) continue;

            struct Blocker {
                std::vector<std::set<std::string>> need;     // per position
                std::vector<std::set<std::string>> exclude;  // per position
            };
            std::vector<Blocker> blockers;
            for (const auto& r : p.rules) {
                const Atom* guard = nullptr;
                bool relevant = true;
                for (const auto& a : r.body) {
                    if (a.relation == rel)
                        guard = &a;
                    else if (!sigma.unary.count(a.relation) &&
                             !sigma.nullary.count(a.relation))
                        relevant = false;
                }
                if (!guard || !relevant) continue;
                Blocker b;
                b.need.resize(arity);
                b.exclude.resize(arity);
                std::map<std::string, int> pos;
                bool sane = true;
                for (int i = 0; i < arity; ++i) {
                    if (!guard->args[i].is_var()) sane = false;
                    else pos[guard->args[i].name] = i;
                }
                if (!sane) continue;
                for (const auto& a : r.body) {
                    if (&a == guard) continue;
                    if (a.args.empty()) {
                        if (!delta.count(a.relation)) sane = false;
                    } else {
                        b.need[pos.at(a.args[0].name)].insert(a.relation);
                    }
                }
                for (const auto& a : r.head) {
                    if (a.args.empty()) {
                        if (delta.count(a.relation)) sane = false;  // never blocks
                    } else {
                        b.exclude[pos.at(a.args[0].name)].insert(a.relation);
                    }
                }
                if (sane) blockers.push_back(std::move(b));
            }

            std::uint64_t count = 1;
            for (int i = 0; i < arity; ++i) {
                count *= std::max<std::size_t>(elems.size(), 1);
                if (count > 4'000'000)
                    throw LimitError("build_templates", "facts", count, 4'000'000);
            }
            if (elems.empty() && arity > 0) continue;
            std::vector<int> odo(arity, 0);
            while (true) {
                bool blocked = false;
                for (const auto& b : blockers) {
                    bool applies = true;
                    for (int i = 0; i < arity && applies; ++i) {
                        const auto& t = types[odo[i]];
                        for (const auto& need : b.need[i])
                            if (!t.count(need)) {
                                applies = false;
                                break;
                            }
                        if (applies)
                            for (const auto& ex : b.exclude[i])
                                if (t.count(ex)) {
                                    applies = false;
                                    break;
                                }
                    }
                    if (applies) {
                        blocked = true;
                        break;
                    }
                }
                if (!blocked) {
                    Atom f{rel, {}};
                    for (int i = 0; i < arity; ++i)
                        f.args.push_back(Term::cst(elems[odo[i]]));
                    tpl.facts.insert(std::move(f));
                }
                int i = arity - 1;
                while (i >= 0 && ++odo[i] == (int)elems.size()) odo[i--] = 0;
                if (i < 0) break;
            }
        }
        out.push_back(std::move(tpl));
    }
    return out;
}

bool check_empty_via_templates(const Program& p, const DisjointnessSet& d,
                               const EmptinessOptions& opts) {
    for (const auto& theta : zero_types(d)) {
        Instance k = build_k_theta(p.edb_schema(), d, theta, opts);
        bool mapped = false;
        for (const auto& tpl : build_templates(p, d, theta, opts))
            if (find_hom(k, tpl)) {
                mapped = true;
                break;
            }
        if (!mapped) return false;
    }
    return true;
}

}  // namespace mdc
