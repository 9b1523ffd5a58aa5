#include "mdc/driver.hpp"

#include "mdc/textio.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mdc {

std::string describe(const Decision& d) {
    std::string out = d.contained ? "CONTAINED" : "NOT_CONTAINED";
    if (d.branch) {
        out += " branch=(";
        for (std::size_t i = 0; i < d.branch->constants.size(); ++i) {
            if (i) out += ",";
            out += d.branch->constants[i];
        }
        out += ")";
    }
    if (d.witness_theta) {
        out += " theta={";
        bool first = true;
        for (const auto& rel : d.witness_theta->relations) {
            if (!first) out += ",";
            first = false;
            out += rel;
        }
        out += "}";
    }
    if (d.witness_k_theta) {
        out += " witness=[";
        std::string facts = render_instance(*d.witness_k_theta);
        std::replace(facts.begin(), facts.end(), '\n', ' ');
        out += facts;
        out += "]";
    }
    return out;
}

Schema unify_edb_schemas(const Program& p1, const Program& p2) {
    auto idb1 = p1.idb_relations();
    auto idb2 = p2.idb_relations();
    for (const auto& rel : p1.edb_relations())
        if (idb2.count(rel))
            throw Error("relation " + rel + " is EDB on the left but IDB on the right");
    for (const auto& rel : p2.edb_relations())
        if (idb1.count(rel))
            throw Error("relation " + rel + " is IDB on the left but EDB on the right");
    return Schema::merged(p1.edb_schema(), p2.edb_schema());
}

std::pair<Program, Program> align_pair(const Program& p1, const Program& p2) {
    Schema shared = unify_edb_schemas(p1, p2);
    Program a1 = p1, a2 = p2;
    a1.schema = Schema::merged(a1.schema, shared);
    a2.schema = Schema::merged(a2.schema, shared);
    return {std::move(a1), std::move(a2)};
}

namespace {

// Lazy reduction-plus-emptiness check. Materializing the annotated program
// costs 2^(|Sigma_I2| * v) rules; here each annotation meets its unique
// grounding on K_theta instead. A variable annotated with one of P / neg$P
// for every unary right IDB matches exactly one 1-type, so walking
// (rule, variables -> complete 1-types) visits every surviving annotated
// ground rule once. 0-types missing one side of a pair fire no rule at all
// and are skipped.
struct FusedEmptiness {
    const AnnotationSystem& sys;
    const ContainOptions& opts;

    std::vector<std::set<std::string>> elements;  // complete 1-types
    std::vector<std::string> names;

    explicit FusedEmptiness(const AnnotationSystem& sys, const ContainOptions& opts)
        : sys(sys), opts(opts) {
        const auto& unary = sys.unary_idb2;
        if (unary.size() > 20)
            throw LimitError("check_empty", "unary annotation relations", unary.size(),
                             20);
        std::uint64_t count = 1ull << unary.size();
        if (count > opts.max_elements)
            throw LimitError("check_empty", "elements", count, opts.max_elements);
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            std::set<std::string> t;
            for (std::size_t i = 0; i < unary.size(); ++i)
                t.insert(mask & (1ull << i) ? unary[i] : "neg$" + unary[i]);
            elements.push_back(std::move(t));
            names.push_back("t" + std::to_string(mask));
        }
    }

    // sigma-embedding of a right rule into the implicit annotated rule given
    // by (rule, h): EDB atoms match syntactically, right-IDB conditions read
    // the 1-types, head disjuncts need their negated form.
    bool removed(const Rule& rule, const std::map<std::string, int>& h,
                 const std::set<std::string>& theta) const {
        auto annotated_has = [&](const std::string& rel, int elem) {
            const auto& t = elements[elem];
            if (t.count(rel)) return true;
            // neg$P holds iff P is absent; complete types make this total.
            return rel.rfind("neg$", 0) == 0 && !t.count(rel.substr(4));
        };
        for (const auto& rr : sys.right.rules) {
            std::map<std::string, std::string> sigma;
            std::function<bool(std::size_t)> match = [&](std::size_t i) -> bool {
                if (i == rr.body.size()) {
                    for (const auto& hd : rr.head) {
                        if (hd.args.empty()) {
                            if (!theta.count("neg$" + hd.relation)) return false;
                        } else {
                            const Term& y = hd.args.front();
                            if (!y.is_var()) return false;
                            if (!annotated_has("neg$" + hd.relation,
                                               h.at(sigma.at(y.name))))
                                return false;
                        }
                    }
                    return true;
                }
                const Atom& pat = rr.body[i];
                bool is_right_idb = h.size() > 0 && pat.relation.rfind("p2$", 0) == 0;
                if (pat.args.empty()) {
                    if (is_right_idb || sys.edb_prime.contains(pat.relation)) {
                        if (pat.relation.rfind("p2$", 0) == 0) {
                            if (!theta.count(pat.relation)) return false;
                            return match(i + 1);
                        }
                    }
                    // Nullary EDB atom: must occur in the left body.
                    for (const auto& a : rule.body)
                        if (a == pat) return match(i + 1);
                    return false;
                }
                if (pat.relation.rfind("p2$", 0) == 0) {
                    // Unary right IDB: any left variable whose type carries it.
                    const Term& x = pat.args.front();
                    if (!x.is_var()) return false;
                    auto it = sigma.find(x.name);
                    if (it != sigma.end()) {
                        if (!annotated_has(pat.relation, h.at(it->second))) return false;
                        return match(i + 1);
                    }
                    for (const auto& [v, elem] : h) {
                        if (!annotated_has(pat.relation, elem)) continue;
                        sigma[x.name] = v;
                        if (match(i + 1)) return true;
                        sigma.erase(x.name);
                    }
                    return false;
                }
                // EDB atom: match against the left rule's body atoms.
                for (const auto& cand : rule.body) {
                    if (cand.relation != pat.relation ||
                        cand.args.size() != pat.args.size())
                        continue;
                    std::vector<std::string> bound;
                    bool ok = true;
                    for (std::size_t k = 0; k < pat.args.size() && ok; ++k) {
                        const Term& s = pat.args[k];
                        const Term& tgt = cand.args[k];
                        if (!s.is_var()) {
                            ok = s == tgt;
                        } else if (!tgt.is_var()) {
                            ok = false;
                        } else if (auto it = sigma.find(s.name); it != sigma.end()) {
                            ok = it->second == tgt.name;
                        } else {
                            sigma.emplace(s.name, tgt.name);
                            bound.push_back(s.name);
                        }
                    }
                    if (ok && match(i + 1)) return true;
                    for (const auto& v : bound) sigma.erase(v);
                }
                return false;
            };
            if (match(0)) return true;
        }
        return false;
    }

    // Builds and solves the ground theory for one complete 0-type.
    bool holds_on(const std::set<std::string>& theta, std::uint64_t* clause_count) {
        GroundTheory theory;
        auto intern = [&theory](Atom a) {
            auto it = theory.atom_ids.find(a);
            if (it != theory.atom_ids.end()) return it->second;
            std::int32_t id = (std::int32_t)theory.atom_table.size();
            theory.atom_table.push_back(a);
            theory.atom_ids.emplace(std::move(a), id);
            return id;
        };
        auto idb = sys.left.idb_relations();
        std::unordered_set<std::string> seen;

        for (const auto& rule : sys.left.rules) {
            auto var_set = rule.variables();
            std::vector<std::string> vars(var_set.begin(), var_set.end());
            std::map<std::string, int> h;
            std::function<void(std::size_t)> walk = [&](std::size_t vi) {
                if (vi < vars.size()) {
                    for (int e = 0; e < (int)elements.size(); ++e) {
                        h[vars[vi]] = e;
                        walk(vi + 1);
                    }
                    h.erase(vars[vi]);
                    return;
                }
                if (removed(rule, h, theta)) return;
                GroundClause clause;
                std::set<std::int32_t> body, head;
                auto ground = [&](const Atom& a) {
                    Atom g{a.relation, {}};
                    for (const auto& t : a.args)
                        g.args.push_back(
                            Term::cst(t.is_var() ? names[h.at(t.name)] : t.name));
                    return g;
                };
                for (const auto& a : rule.body)
                    if (idb.count(a.relation)) body.insert(intern(ground(a)));
                for (const auto& a : rule.head) head.insert(intern(ground(a)));
                for (auto x : head)
                    if (body.count(x)) return;
                clause.body.assign(body.begin(), body.end());
                clause.head.assign(head.begin(), head.end());
                std::string key;
                for (auto v : clause.body) key += std::to_string(v) + ",";
                key += "|";
                for (auto v : clause.head) key += std::to_string(v) + ",";
                if (!seen.insert(key).second) return;
                theory.clauses.push_back(std::move(clause));
                if (theory.clauses.size() > opts.eval.max_ground_clauses)
                    throw LimitError("check_empty", "ground clauses",
                                     theory.clauses.size(),
                                     opts.eval.max_ground_clauses);
            };
            walk(0);
        }
        *clause_count = theory.clauses.size();
        Atom goal{sys.left.goal, {}};
        auto it = theory.atom_ids.find(goal);
        std::vector<std::int32_t> forced;
        if (it != theory.atom_ids.end()) forced.push_back(it->second);
        return !theory_satisfiable(theory, forced, opts.eval);
    }

    EmptinessResult run(StageStats* stats) {
        // Complete 0-types: neg$goal2 is forced, every other nullary pair
        // picks a side.
        const auto& nullary = sys.nullary_idb2;
        if (nullary.size() > 20)
            throw LimitError("check_empty", "nullary annotation relations",
                             nullary.size(), 20);
        EmptinessResult res;
        std::uint64_t total = 1ull << nullary.size();
        if (stats) stats->zero_types = total;
        auto theta_of = [&](std::uint64_t mask) {
            std::set<std::string> theta{"neg$" + sys.right_goal};
            for (std::size_t i = 0; i < nullary.size(); ++i)
                theta.insert(mask & (1ull << i) ? nullary[i] : "neg$" + nullary[i]);
            return theta;
        };

        // 0-types evaluated in parallel batches; the earliest witness in mask
        // order wins, so the verdict is scheduling-independent.
        const std::uint64_t batch = 16;
        std::int64_t winner = -1;
        std::uint64_t max_clauses = 0;
        for (std::uint64_t base = 0; base < total && winner < 0; base += batch) {
            int n = (int)std::min(batch, total - base);
            std::vector<signed char> hit(n, 0);
            std::vector<std::uint64_t> clauses(n, 0);
            std::vector<std::string> errors(n);
            auto run_one = [&](int k) {
                try {
                    hit[k] = holds_on(theta_of(base + k), &clauses[k]) ? 1 : 0;
                } catch (const Error& e) {
                    errors[k] = e.what();
                    hit[k] = 2;
                }
            };
#ifdef _OPENMP
            if (opts.parallel && total > 1) {
#pragma omp parallel for schedule(dynamic)
                for (int k = 0; k < n; ++k) run_one(k);
            } else {
                for (int k = 0; k < n; ++k) run_one(k);
            }
#else
            for (int k = 0; k < n; ++k) run_one(k);
#endif
            for (int k = 0; k < n; ++k) {
                if (hit[k] == 2) throw Error(errors[k]);
                max_clauses = std::max(max_clauses, clauses[k]);
            }
            for (int k = 0; k < n; ++k)
                if (hit[k] == 1) {
                    winner = (std::int64_t)(base + k);
                    break;
                }
        }
        if (stats) stats->reduced_rules = std::max(stats->reduced_rules, max_clauses);
        if (winner < 0) return res;

        res.empty = false;
        res.witness_theta = ZeroType{theta_of((std::uint64_t)winner)};
        EmptinessOptions eo;
        eo.eval = opts.eval;
        eo.max_elements = opts.max_elements;
        try {
            res.witness_k_theta =
                build_k_theta(sys.edb_prime, sys.disjointness, *res.witness_theta, eo);
        } catch (const LimitError&) {
            // The 0-type is still reported without the instance.
        }
        return res;
    }
};

OracleResult brute_impl(const Program& p1, const Program& p2, int max_domain,
                        Girth min_girth, const BruteOptions& opts, bool parallel) {
    auto [a1, a2] = align_pair(p1, p2);
    if (a1.arity != a2.arity) throw Error("brute_contains: arity mismatch");
    Schema shared = unify_edb_schemas(p1, p2);

    OracleResult res;
    res.max_domain = max_domain;
    std::set<std::string> pinned_set;
    for (const Program* p : {&a1, &a2})
        for (const auto& r : p->rules)
            for (const auto& c : r.constants()) pinned_set.insert(c);
    std::vector<std::string> pinned(pinned_set.begin(), pinned_set.end());
    InstanceEnumerator en(shared, max_domain, min_girth, pinned);

    struct Hit {
        Instance instance;
        Tuple tuple;
    };
    while (true) {
        std::vector<Instance> batch;
        while (batch.size() < opts.batch) {
            auto i = en.next();
            if (!i) break;
            batch.push_back(std::move(*i));
        }
        if (batch.empty()) break;
        std::vector<std::optional<Hit>> hits(batch.size());
        std::vector<std::string> errors(batch.size());

        auto run_one = [&](int k) {
            try {
                TupleSet left = ddlog_answers(a1, batch[k], opts.eval);
                if (left.empty()) return;
                TupleSet right = ddlog_answers(a2, batch[k], opts.eval);
                for (const auto& t : left)
                    if (!right.count(t)) {
                        hits[k] = Hit{batch[k], t};
                        return;
                    }
            } catch (const Error& e) {
                errors[k] = e.what();
            }
        };
        const int n = (int)batch.size();
#ifdef _OPENMP
        if (parallel) {
#pragma omp parallel for schedule(dynamic)
            for (int k = 0; k < n; ++k) run_one(k);
        } else {
            for (int k = 0; k < n; ++k) run_one(k);
        }
#else
        (void)parallel;
        for (int k = 0; k < n; ++k) run_one(k);
#endif
        for (int k = 0; k < n; ++k)
            if (!errors[k].empty()) throw Error(errors[k]);
        for (int k = 0; k < n; ++k)
            if (hits[k]) {
                res.counterexample = std::move(hits[k]->instance);
                res.tuple = std::move(hits[k]->tuple);
                return res;
            }
    }
    return res;
}

}  // namespace

Decision contain(const Program& p1, const Program& p2, const ContainOptions& opts) {
    auto v1 = validate_program(p1);
    if (!v1.ok) throw Error("left program invalid: " + v1.violations.front());
    auto v2 = validate_program(p2);
    if (!v2.ok) throw Error("right program invalid: " + v2.violations.front());
    if (p1.arity != p2.arity) throw Error("programs disagree on arity");

    auto [a1, a2] = align_pair(p1, p2);

    Decision d;
    d.contained = true;
    auto tuples = constant_tuples(a1, a2);
    d.stats.branches = tuples.size();
    for (const auto& t : tuples) {
        Program b1 = specialize_goal(a1, t);
        Program b2 = specialize_goal(a2, t);
        std::tie(b1, b2) = eliminate_constants(b1, b2);
        SimplifyResult s = simplify_pair(b1, b2);
        d.stats.simplified_rules_left = s.left.rules.size();
        d.stats.simplified_rules_right = s.right.rules.size();
        AnnotationSystem sys = make_annotation_system(s.left, s.right);
        d.stats.disjointness_rules = sys.disjointness.rules.size();
        FusedEmptiness fused(sys, opts);
        EmptinessResult res = fused.run(&d.stats);
        if (!res.empty) {
            d.contained = false;
            d.branch = t;
            d.witness_theta = res.witness_theta;
            d.witness_k_theta = res.witness_k_theta;
            // Unfold the witness through the consolidation and constant
            // bridges and keep it only when the original pair confirms it.
            if (d.witness_k_theta && d.witness_k_theta->facts.size() <= 20000) {
                try {
                    Instance stripped;
                    stripped.schema = d.witness_k_theta->schema;
                    for (const auto& f : d.witness_k_theta->facts)
                        if (s.map.by_relation(f.relation)) stripped.facts.insert(f);
                    Instance unfolded =
                        from_consolidated(stripped, s.map, b1.edb_schema());
                    Instance original = quotient_marked(unfolded);
                    Program left_branch = specialize_goal(a1, t);
                    Program right_branch = specialize_goal(a2, t);
                    if (ddlog_holds(left_branch, original, opts.eval) &&
                        !ddlog_holds(right_branch, original, opts.eval)) {
                        d.counterexample = std::move(original);
                        d.counterexample_tuple = Tuple(t.constants);
                    }
                } catch (const Error&) {
                    // Guards or mark clashes: leave the witness uncertified.
                }
            }
            break;
        }
    }
    return d;
}

Decision contain_mmsnp(const MMSNPSentence& phi1, const MMSNPSentence& phi2,
                       const ContainOptions& opts) {
    Schema shared = Schema::merged(phi1.edb_schema, phi2.edb_schema);
    Program left = mmsnp_to_mddlog(phi2, shared);
    Program right = mmsnp_to_mddlog(phi1, shared);
    return contain(left, right, opts);
}

OracleResult brute_contains(const Program& p1, const Program& p2, int max_domain,
                            Girth min_girth_exclusive, const BruteOptions& opts) {
    return brute_impl(p1, p2, max_domain, min_girth_exclusive, opts, opts.parallel);
}

OracleResult brute_contains_serial(const Program& p1, const Program& p2,
                                   int max_domain, Girth min_girth_exclusive,
                                   const BruteOptions& opts) {
    return brute_impl(p1, p2, max_domain, min_girth_exclusive, opts, false);
}

}  // namespace mdc
