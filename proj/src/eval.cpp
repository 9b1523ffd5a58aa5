#include "mdc/eval.hpp"

#include <algorithm>
#include <cassert>
#include <climits>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace mdc {

bool girth_exceeds(Girth g, Girth bound) {
    if (!bound) return !g;  // infinite bound keeps trees only
    if (!g) return true;
    return *g > *bound;
}

namespace {

struct HalfEdge {
    int to;
    int fact;
};

Girth girth_of(const std::vector<const Atom*>& facts) {
    for (const Atom* f : facts) {
        std::set<std::string> seen;
        for (const auto& t : f->args)
            if (!seen.insert(t.name).second) return 1;
    }
    std::map<std::string, int> vid;
    for (const Atom* f : facts)
        for (const auto& t : f->args)
            vid.emplace(t.name, (int)vid.size());
    const int n = (int)vid.size();
    std::vector<std::vector<HalfEdge>> adj(n);
    int fid = 0;
    for (const Atom* f : facts) {
        for (std::size_t i = 0; i < f->args.size(); ++i)
            for (std::size_t j = i + 1; j < f->args.size(); ++j) {
                int u = vid[f->args[i].name], v = vid[f->args[j].name];
                adj[u].push_back({v, fid});
                adj[v].push_back({u, fid});
            }
        ++fid;
    }

    // Shortest cycle with pairwise distinct facts. After the length-1 check a
    // shortest cycle never repeats a vertex, so a simple-path search suffices.
    int best = INT_MAX;
    std::vector<char> onpath(n, 0), used(facts.size(), 0);
    std::function<void(int, int, int)> dfs = [&](int start, int v, int depth) {
        for (const HalfEdge& e : adj[v]) {
            if (used[e.fact]) continue;
            if (e.to == start) {
                if (depth + 1 >= 2 || (depth + 1 == 1)) best = std::min(best, depth + 1);
                continue;
            }
            if (e.to < start || onpath[e.to]) continue;
            if (depth + 2 >= best) continue;
            onpath[e.to] = 1;
            used[e.fact] = 1;
            dfs(start, e.to, depth + 1);
            used[e.fact] = 0;
            onpath[e.to] = 0;
        }
    };
    for (int s = 0; s < n && best > 2; ++s) {
        onpath[s] = 1;
        dfs(s, s, 0);
        onpath[s] = 0;
    }
    if (best == INT_MAX) return std::nullopt;
    return best;
}

}  // namespace

Girth girth(const Instance& instance) {
    std::vector<const Atom*> facts;
    facts.reserve(instance.facts.size());
    for (const auto& f : instance.facts) facts.push_back(&f);
    return girth_of(facts);
}

namespace {

using RelIndex = std::map<std::string, std::vector<const Atom*>>;

RelIndex index_facts(const Instance& instance) {
    RelIndex idx;
    for (const auto& f : instance.facts) idx[f.relation].push_back(&f);
    return idx;
}

}  // namespace

std::optional<Homomorphism> find_hom(const Instance& from, const Instance& to) {
    // Nullary facts must be preserved outright.
    for (const auto& f : from.facts)
        if (f.args.empty() && !to.facts.count(f)) return std::nullopt;

    std::vector<std::string> src;
    for (const auto& c : from.adom()) src.push_back(c);
    if (src.empty()) return Homomorphism{};

    // Relational profiles: h(a) must occur at every (relation, position) where
    // a occurs.
    auto profile_of = [](const Instance& inst) {
        std::map<std::string, std::set<std::pair<std::string, int>>> prof;
        for (const auto& f : inst.facts)
            for (std::size_t i = 0; i < f.args.size(); ++i)
                prof[f.args[i].name].insert({f.relation, (int)i});
        return prof;
    };
    auto src_prof = profile_of(from);
    auto dst_prof = profile_of(to);

    std::map<std::string, std::vector<std::string>> candidates;
    for (const auto& a : src) {
        std::vector<std::string> cs;
        for (const auto& [b, bp] : dst_prof) {
            bool ok = true;
            for (const auto& need : src_prof[a])
                if (!bp.count(need)) {
                    ok = false;
                    break;
                }
            if (ok) cs.push_back(b);
        }
        if (cs.empty()) return std::nullopt;
        candidates[a] = std::move(cs);
    }
    std::sort(src.begin(), src.end(), [&](const std::string& a, const std::string& b) {
        auto ka = std::make_pair(candidates[a].size(), a);
        auto kb = std::make_pair(candidates[b].size(), b);
        return ka < kb;
    });

    // Facts become checkable once all their constants are mapped.
    std::map<std::string, int> pos;
    for (std::size_t i = 0; i < src.size(); ++i) pos[src[i]] = (int)i;
    std::vector<std::vector<const Atom*>> due(src.size());
    for (const auto& f : from.facts) {
        if (f.args.empty()) continue;
        int latest = -1;
        for (const auto& t : f.args) latest = std::max(latest, pos[t.name]);
        due[latest].push_back(&f);
    }

    std::map<std::string, std::string> assign;
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        if (i == src.size()) return true;
        for (const auto& cand : candidates[src[i]]) {
            assign[src[i]] = cand;
            bool ok = true;
            for (const Atom* f : due[i]) {
                Atom img = *f;
                for (auto& t : img.args) t.name = assign.at(t.name);
                if (!to.facts.count(img)) {
                    ok = false;
                    break;
                }
            }
            if (ok && go(i + 1)) return true;
        }
        assign.erase(src[i]);
        return false;
    };
    if (!go(0)) return std::nullopt;
    return Homomorphism{assign};
}

namespace {

// Backtracking CQ matcher with dynamic most-constrained-atom selection.
// Candidate facts come from per-(relation, position, constant) buckets, so
// atoms touching bound variables scan only the matching slice.
class CqMatcher {
public:
    CqMatcher(const ConjunctiveQuery& q, const Instance& instance)
        : q_(q), idx_(index_facts(instance)) {
        for (const auto& c : instance.adom()) adom_.push_back(c);
        for (const auto& f : instance.facts)
            for (std::size_t i = 0; i < f.args.size(); ++i)
                buckets_[key(f.relation, i, f.args[i].name)].push_back(&f);
    }

    TupleSet run(bool stop_at_first) {
        stop_first_ = stop_at_first;
        matched_.assign(q_.atoms.size(), false);
        search();
        return std::move(results_);
    }

private:
    static std::string key(const std::string& rel, std::size_t pos,
                           const std::string& name) {
        return rel + "\x1f" + std::to_string(pos) + "\x1f" + name;
    }

    bool consistent(const Atom& pattern, const Atom& fact) const {
        if (pattern.args.size() != fact.args.size()) return false;
        std::map<std::string, std::string> local;
        for (std::size_t i = 0; i < pattern.args.size(); ++i) {
            const Term& t = pattern.args[i];
            const std::string& v = fact.args[i].name;
            if (!t.is_var()) {
                if (t.name != v) return false;
            } else if (auto it = binding_.find(t.name); it != binding_.end()) {
                if (it->second != v) return false;
            } else if (auto [lit, ins] = local.emplace(t.name, v); !ins) {
                if (lit->second != v) return false;
            }
        }
        return true;
    }

    const std::vector<const Atom*>* slice(const Atom& pattern) const {
        const std::vector<const Atom*>* best = nullptr;
        auto it = idx_.find(pattern.relation);
        if (it == idx_.end()) return &empty_;
        best = &it->second;
        for (std::size_t i = 0; i < pattern.args.size(); ++i) {
            const Term& t = pattern.args[i];
            const std::string* bound = nullptr;
            if (!t.is_var())
                bound = &t.name;
            else if (auto b = binding_.find(t.name); b != binding_.end())
                bound = &b->second;
            if (!bound) continue;
            auto bit = buckets_.find(key(pattern.relation, i, *bound));
            if (bit == buckets_.end()) return &empty_;
            if (bit->second.size() < best->size()) best = &bit->second;
        }
        return best;
    }

    std::vector<const Atom*> candidates(const Atom& pattern) const {
        std::vector<const Atom*> out;
        for (const Atom* f : *slice(pattern))
            if (consistent(pattern, *f)) out.push_back(f);
        return out;
    }

    void emit() {
        // Answer variables that appear in no atom range over the domain.
        std::vector<std::string> free;
        Tuple t(q_.answer_vars.size());
        for (std::size_t i = 0; i < q_.answer_vars.size(); ++i) {
            auto it = binding_.find(q_.answer_vars[i]);
            if (it != binding_.end())
                t[i] = it->second;
            else
                free.push_back(q_.answer_vars[i]);
        }
        if (free.empty()) {
            results_.insert(std::move(t));
            return;
        }
        std::function<void(std::size_t)> fill = [&](std::size_t k) {
            if (k == free.size()) {
                Tuple out(q_.answer_vars.size());
                for (std::size_t i = 0; i < q_.answer_vars.size(); ++i) {
                    auto it = binding_.find(q_.answer_vars[i]);
                    out[i] = it != binding_.end() ? it->second : filled_.at(q_.answer_vars[i]);
                }
                results_.insert(std::move(out));
                return;
            }
            for (const auto& c : adom_) {
                filled_[free[k]] = c;
                fill(k + 1);
            }
        };
        fill(0);
    }

    bool search() {
        // Cheap slice-size estimates select the next atom; only the chosen
        // slice is scanned for consistent facts.
        std::size_t pick = q_.atoms.size();
        std::size_t best_count = SIZE_MAX;
        for (std::size_t i = 0; i < q_.atoms.size(); ++i) {
            if (matched_[i]) continue;
            std::size_t estimate = slice(q_.atoms[i])->size();
            if (estimate < best_count) {
                best_count = estimate;
                pick = i;
                if (best_count == 0) break;
            }
        }
        if (pick == q_.atoms.size()) {
            emit();
            return stop_first_ && !results_.empty();
        }
        if (best_count == 0) return false;
        std::vector<const Atom*> best_cands = candidates(q_.atoms[pick]);
        matched_[pick] = true;
        for (const Atom* f : best_cands) {
            std::vector<std::string> bound_here;
            const Atom& pat = q_.atoms[pick];
            for (std::size_t i = 0; i < pat.args.size(); ++i) {
                if (!pat.args[i].is_var()) continue;
                if (binding_.emplace(pat.args[i].name, f->args[i].name).second)
                    bound_here.push_back(pat.args[i].name);
            }
            if (search()) return true;
            for (const auto& v : bound_here) binding_.erase(v);
        }
        matched_[pick] = false;
        return false;
    }

    const ConjunctiveQuery& q_;
    RelIndex idx_;
    std::map<std::string, std::vector<const Atom*>> buckets_;
    std::vector<const Atom*> empty_;
    std::vector<std::string> adom_;
    std::map<std::string, std::string> binding_;
    std::map<std::string, std::string> filled_;
    std::vector<char> matched_;
    TupleSet results_;
    bool stop_first_ = false;
};

}  // namespace

TupleSet eval_cq(const ConjunctiveQuery& q, const Instance& instance) {
    CqMatcher m(q, instance);
    return m.run(q.answer_vars.empty());
}

TupleSet eval_ucq(const UnionQuery& q, const Instance& instance) {
    TupleSet out;
    for (const auto& cq : q.disjuncts) {
        if (cq.answer_vars.empty() && !out.empty()) break;
        auto part = eval_cq(cq, instance);
        out.insert(part.begin(), part.end());
    }
    return out;
}

FactSource FactSource::of(const Instance& instance) {
    FactSource s;
    s.facts = &instance;
    for (const auto& c : instance.adom()) s.domain.push_back(c);
    return s;
}

namespace {

// Enumerates tuples of a full relation consistent with partially bound
// positions without materializing it.
class FullRelationScan {
public:
    FullRelationScan(int arity, const std::vector<std::string>& domain)
        : arity_(arity), domain_(domain) {}

    template <typename Fn>
    void for_each(const std::vector<std::optional<std::string>>& fixed, Fn&& fn) const {
        std::vector<std::string> tuple(arity_);
        rec(0, fixed, tuple, fn);
    }

private:
    template <typename Fn>
    void rec(int i, const std::vector<std::optional<std::string>>& fixed,
             std::vector<std::string>& tuple, Fn&& fn) const {
        if (i == arity_) {
            fn(tuple);
            return;
        }
        if (fixed[i]) {
            tuple[i] = *fixed[i];
            rec(i + 1, fixed, tuple, fn);
            return;
        }
        for (const auto& c : domain_) {
            tuple[i] = c;
            rec(i + 1, fixed, tuple, fn);
        }
    }

    int arity_;
    const std::vector<std::string>& domain_;
};

struct Grounder {
    const Program& p;
    const FactSource& src;
    const EvalOptions& opts;
    GroundTheory theory;
    std::set<std::string> idb;
    RelIndex idx;
    std::map<std::string, std::vector<const Atom*>> buckets;
    std::vector<const Atom*> no_facts;
    std::vector<std::string> domain;  // adom plus program constants
    std::unordered_set<std::string> clause_seen;

    Grounder(const Program& p, const FactSource& src, const EvalOptions& opts)
        : p(p), src(src), opts(opts) {
        idb = p.idb_relations();
        idx = index_facts(*src.facts);
        for (const auto& f : src.facts->facts)
            for (std::size_t i = 0; i < f.args.size(); ++i)
                buckets[bucket_key(f.relation, i, f.args[i].name)].push_back(&f);
        std::set<std::string> dom(src.domain.begin(), src.domain.end());
        for (const auto& r : p.rules)
            for (const auto& c : r.constants()) dom.insert(c);
        domain.assign(dom.begin(), dom.end());
        check_compatible();
    }

    static std::string bucket_key(const std::string& rel, std::size_t pos,
                                  const std::string& name) {
        return rel + "\x1f" + std::to_string(pos) + "\x1f" + name;
    }

    // Smallest fact slice consistent with the bound positions of `a`.
    const std::vector<const Atom*>* slice(
        const Atom& a, const std::map<std::string, std::string>& b) const {
        auto it = idx.find(a.relation);
        if (it == idx.end()) return &no_facts;
        const std::vector<const Atom*>* best = &it->second;
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            const Term& t = a.args[i];
            const std::string* bound = nullptr;
            if (!t.is_var())
                bound = &t.name;
            else if (auto bit = b.find(t.name); bit != b.end())
                bound = &bit->second;
            if (!bound) continue;
            auto bucket = buckets.find(bucket_key(a.relation, i, *bound));
            if (bucket == buckets.end()) return &no_facts;
            if (bucket->second.size() < best->size()) best = &bucket->second;
        }
        return best;
    }

    void check_compatible() const {
        for (const auto& [rel, arity] : src.facts->schema.relations) {
            if (!p.schema.contains(rel)) continue;  // extra EDB relations never match
            if (p.schema.arity_of(rel) != arity)
                throw Error("instance relation " + rel + " has arity " +
                            std::to_string(arity) + " but the program expects " +
                            std::to_string(p.schema.arity_of(rel)));
            if (idb.count(rel))
                throw Error("instance uses IDB relation " + rel);
        }
    }

    std::int32_t intern(const Atom& a) {
        auto it = theory.atom_ids.find(a);
        if (it != theory.atom_ids.end()) return it->second;
        std::int32_t id = (std::int32_t)theory.atom_table.size();
        theory.atom_table.push_back(a);
        theory.atom_ids.emplace(a, id);
        return id;
    }

    Atom substitute(const Atom& a, const std::map<std::string, std::string>& b) const {
        Atom out = a;
        for (auto& t : out.args)
            if (t.is_var()) t = Term::cst(b.at(t.name));
        return out;
    }

    void emit_clause(const Rule& r, const std::map<std::string, std::string>& b) {
        GroundClause c;
        std::set<std::int32_t> body, head;
        for (const auto& a : r.body)
            if (idb.count(a.relation)) body.insert(intern(substitute(a, b)));
        for (const auto& a : r.head) head.insert(intern(substitute(a, b)));
        for (auto h : head)
            if (body.count(h)) return;  // tautology
        c.body.assign(body.begin(), body.end());
        c.head.assign(head.begin(), head.end());
        std::string key;
        for (auto v : c.body) key += std::to_string(v) + ",";
        key += "|";
        for (auto v : c.head) key += std::to_string(v) + ",";
        if (!clause_seen.insert(key).second) return;
        theory.clauses.push_back(std::move(c));
        if (theory.clauses.size() > opts.max_ground_clauses)
            throw LimitError("ground", "ground clauses", theory.clauses.size(),
                             opts.max_ground_clauses);
    }

    // Join the EDB body atoms against the fact source, most constrained first,
    // then range residual variables over the domain.
    void ground_rule(const Rule& r) {
        std::vector<const Atom*> edb_atoms;
        for (const auto& a : r.body)
            if (!idb.count(a.relation)) edb_atoms.push_back(&a);
        std::map<std::string, std::string> binding;
        join(r, edb_atoms, std::vector<char>(edb_atoms.size(), 0), binding);
    }

    std::uint64_t candidate_count(const Atom& a,
                                  const std::map<std::string, std::string>& b) const {
        if (src.full_relations.count(a.relation)) {
            std::uint64_t n = 1;
            std::set<std::string> unbound;
            for (const auto& t : a.args)
                if (t.is_var() && !b.count(t.name)) unbound.insert(t.name);
            for (std::size_t i = 0; i < unbound.size(); ++i) {
                n *= domain.size();
                if (n > 1'000'000'000ull) break;
            }
            return n;
        }
        return slice(a, b)->size();
    }

    void join(const Rule& r, const std::vector<const Atom*>& edb_atoms,
              std::vector<char> matched, std::map<std::string, std::string>& binding) {
        std::size_t pick = edb_atoms.size();
        std::uint64_t best = UINT64_MAX;
        for (std::size_t i = 0; i < edb_atoms.size(); ++i) {
            if (matched[i]) continue;
            auto n = candidate_count(*edb_atoms[i], binding);
            if (n < best) {
                best = n;
                pick = i;
            }
        }
        if (pick == edb_atoms.size()) {
            finish(r, binding);
            return;
        }
        matched[pick] = true;
        const Atom& pat = *edb_atoms[pick];
        auto try_tuple = [&](const std::vector<std::string>& tuple) {
            std::vector<std::string> bound_here;
            bool ok = true;
            for (std::size_t i = 0; i < pat.args.size() && ok; ++i) {
                const Term& t = pat.args[i];
                if (!t.is_var()) {
                    ok = t.name == tuple[i];
                } else if (auto it = binding.find(t.name); it != binding.end()) {
                    ok = it->second == tuple[i];
                } else {
                    binding.emplace(t.name, tuple[i]);
                    bound_here.push_back(t.name);
                }
            }
            if (ok) join(r, edb_atoms, matched, binding);
            for (const auto& v : bound_here) binding.erase(v);
        };
        if (src.full_relations.count(pat.relation)) {
            std::vector<std::optional<std::string>> fixed(pat.args.size());
            for (std::size_t i = 0; i < pat.args.size(); ++i) {
                const Term& t = pat.args[i];
                if (!t.is_var())
                    fixed[i] = t.name;
                else if (auto it = binding.find(t.name); it != binding.end())
                    fixed[i] = it->second;
            }
            FullRelationScan scan((int)pat.args.size(), domain);
            scan.for_each(fixed, try_tuple);
        } else {
            std::vector<std::string> tuple;
            for (const Atom* f : *slice(pat, binding)) {
                tuple.clear();
                for (const auto& t : f->args) tuple.push_back(t.name);
                try_tuple(tuple);
            }
        }
        matched[pick] = false;
    }

    void finish(const Rule& r, std::map<std::string, std::string>& binding) {
        std::vector<std::string> residual;
        for (const auto& v : r.variables())
            if (!binding.count(v)) residual.push_back(v);
        std::function<void(std::size_t)> rec = [&](std::size_t k) {
            if (k == residual.size()) {
                emit_clause(r, binding);
                return;
            }
            for (const auto& c : domain) {
                binding[residual[k]] = c;
                rec(k + 1);
            }
            binding.erase(residual[k]);
        };
        rec(0);
    }

    GroundTheory run() {
        for (const auto& r : p.rules) ground_rule(r);
        theory.fixed_facts = *src.facts;
        return std::move(theory);
    }
};

// Conflict-driven clause learning over the ground theory: two watched
// literals, first-UIP learning, activity-ordered decisions with saved phases
// (false first, keeping satisfying extensions near minimal models) and
// periodic restarts. Each satisfiable() call resets the solver, so the
// learned clauses of one assumption set never leak into the next.
class Solver {
public:
    Solver(const GroundTheory& t, const EvalOptions& opts) : opts_(opts) {
        nvars_ = t.atom_table.size();
        for (const auto& c : t.clauses) {
            std::vector<int> lits;
            lits.reserve(c.body.size() + c.head.size());
            for (auto v : c.body) lits.push_back(neg_lit(v));
            for (auto v : c.head) lits.push_back(pos_lit(v));
            std::sort(lits.begin(), lits.end());
            lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
            bool tautology = false;
            for (std::size_t i = 0; i + 1 < lits.size(); ++i)
                if (lits[i] == (lits[i + 1] ^ 1)) tautology = true;
            if (tautology) continue;
            if (lits.empty())
                empty_clause_ = true;
            else if (lits.size() == 1)
                base_units_.push_back(lits[0]);
            else
                base_clauses_.push_back(std::move(lits));
        }
    }

    bool satisfiable(const std::vector<std::int32_t>& forced_false) {
        if (empty_clause_) return false;
        reset();
        for (auto v : forced_false)
            if (!enqueue_checked(neg_lit(v))) return false;
        for (int lit : base_units_)
            if (!enqueue_checked(lit)) return false;

        std::uint64_t until_restart = 256;
        while (true) {
            int confl = propagate();
            if (confl >= 0) {
                bump_steps(8);
                if (level_now_ == 0) return false;
                std::vector<int> learned;
                int back_level = 0;
                analyze(confl, learned, back_level);
                cancel_to(back_level);
                if (learned.size() == 1) {
                    if (!enqueue_checked(learned[0])) return false;
                } else {
                    int ref = (int)clauses_.size();
                    clauses_.push_back(std::move(learned));
                    attach(ref);
                    enqueue(clauses_[ref][0], ref);
                }
                inc_ *= 1.05;
                if (--until_restart == 0) {
                    until_restart = 256;
                    cancel_to(0);
                }
                continue;
            }
            int v = pick_branch();
            if (v < 0) return true;
            ++level_now_;
            trail_lim_.push_back((int)trail_.size());
            enqueue(phase_[v] == 1 ? pos_lit(v) : neg_lit(v), -1);
        }
    }

private:
    static int pos_lit(int v) { return v << 1; }
    static int neg_lit(int v) { return v << 1 | 1; }
    static int lit_var(int l) { return l >> 1; }
    static bool lit_negated(int l) { return (l & 1) != 0; }

    std::int8_t lit_value(int l) const {
        std::int8_t v = value_[lit_var(l)];
        if (v == -1) return -1;
        return lit_negated(l) ? (std::int8_t)(1 - v) : v;
    }

    void bump_steps(std::uint64_t n) {
        steps_ += n;
        if (steps_ > opts_.max_solver_steps)
            throw LimitError("solve", "solver steps", steps_, opts_.max_solver_steps);
    }

    void reset() {
        value_.assign(nvars_, -1);
        reason_.assign(nvars_, -1);
        level_.assign(nvars_, 0);
        if (activity_.size() != nvars_) activity_.assign(nvars_, 0.0);
        if (phase_.size() != nvars_) phase_.assign(nvars_, 0);
        clauses_ = base_clauses_;
        watches_.assign(2 * nvars_, {});
        for (int ref = 0; ref < (int)clauses_.size(); ++ref) attach(ref);
        trail_.clear();
        trail_lim_.clear();
        qhead_ = 0;
        level_now_ = 0;
    }

    void attach(int ref) {
        watches_[clauses_[ref][0] ^ 1].push_back(ref);
        watches_[clauses_[ref][1] ^ 1].push_back(ref);
    }

    void enqueue(int lit, int reason) {
        int v = lit_var(lit);
        value_[v] = lit_negated(lit) ? 0 : 1;
        reason_[v] = reason;
        level_[v] = level_now_;
        trail_.push_back(lit);
    }

    bool enqueue_checked(int lit) {
        std::int8_t val = lit_value(lit);
        if (val == 0) return false;
        if (val == -1) enqueue(lit, -1);
        return true;
    }

    // Returns a conflicting clause reference or -1.
    int propagate() {
        while (qhead_ < trail_.size()) {
            int lit = trail_[qhead_++];
            bump_steps(1);
            auto& ws = watches_[lit];
            std::size_t i = 0, j = 0;
            int confl = -1;
            for (; i < ws.size(); ++i) {
                int ref = ws[i];
                auto& c = clauses_[ref];
                int false_lit = lit ^ 1;
                if (c[0] == false_lit) std::swap(c[0], c[1]);
                if (lit_value(c[0]) == 1) {
                    ws[j++] = ref;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.size(); ++k)
                    if (lit_value(c[k]) != 0) {
                        std::swap(c[1], c[k]);
                        watches_[c[1] ^ 1].push_back(ref);
                        moved = true;
                        break;
                    }
                if (moved) continue;
                ws[j++] = ref;
                if (lit_value(c[0]) == 0) {
                    confl = ref;
                    ++i;
                    break;
                }
                enqueue(c[0], ref);
            }
            for (; i < ws.size(); ++i) ws[j++] = ws[i];
            ws.resize(j);
            if (confl >= 0) return confl;
        }
        return -1;
    }

    void analyze(int confl, std::vector<int>& learned, int& back_level) {
        learned.assign(1, 0);
        seen_.assign(nvars_, 0);
        int counter = 0;
        int uip_lit = -1;
        int skip_lit = -1;  // literal whose reason clause is being expanded
        std::size_t index = trail_.size();
        int ref = confl;
        do {
            for (int q : clauses_[ref]) {
                if (q == skip_lit) continue;
                int v = lit_var(q);
                if (seen_[v] || level_[v] == 0) continue;
                seen_[v] = 1;
                bump_activity(v);
                if (level_[v] == level_now_)
                    ++counter;
                else
                    learned.push_back(q);
            }
            do {
                --index;
            } while (!seen_[lit_var(trail_[index])]);
            uip_lit = trail_[index];
            seen_[lit_var(uip_lit)] = 0;
            ref = reason_[lit_var(uip_lit)];
            skip_lit = uip_lit;
            --counter;
        } while (counter > 0);
        learned[0] = uip_lit ^ 1;

        back_level = 0;
        if (learned.size() > 1) {
            std::size_t max_i = 1;
            for (std::size_t k = 2; k < learned.size(); ++k)
                if (level_[lit_var(learned[k])] > level_[lit_var(learned[max_i])])
                    max_i = k;
            std::swap(learned[1], learned[max_i]);
            back_level = level_[lit_var(learned[1])];
        }
    }

    void cancel_to(int lvl) {
        if (level_now_ <= lvl) return;
        int limit = trail_lim_[lvl];
        for (int i = (int)trail_.size() - 1; i >= limit; --i) {
            int v = lit_var(trail_[i]);
            phase_[v] = value_[v];
            value_[v] = -1;
            reason_[v] = -1;
        }
        trail_.resize(limit);
        trail_lim_.resize(lvl);
        qhead_ = trail_.size();
        level_now_ = lvl;
    }

    int pick_branch() {
        // Highest-activity unassigned variable; the plain scan is fine at the
        // theory sizes this engine sees.
        int best = -1;
        double best_act = -1.0;
        for (std::size_t v = 0; v < nvars_; ++v)
            if (value_[v] == -1 && activity_[v] > best_act) {
                best = (int)v;
                best_act = activity_[v];
            }
        return best;
    }

    void bump_activity(int v) {
        activity_[v] += inc_;
        if (activity_[v] > 1e100) {
            for (auto& a : activity_) a *= 1e-100;
            inc_ *= 1e-100;
        }
    }

    const EvalOptions& opts_;
    std::size_t nvars_ = 0;
    bool empty_clause_ = false;
    std::vector<std::vector<int>> base_clauses_;
    std::vector<int> base_units_;
    std::vector<std::vector<int>> clauses_;
    std::vector<std::vector<int>> watches_;
    std::vector<std::int8_t> value_;
    std::vector<int> reason_;
    std::vector<int> level_;
    std::vector<double> activity_;
    std::vector<std::int8_t> phase_;
    std::vector<char> seen_;
    std::vector<int> trail_;
    std::vector<int> trail_lim_;
    std::size_t qhead_ = 0;
    int level_now_ = 0;
    std::uint64_t steps_ = 0;
    double inc_ = 1.0;
};

}  // namespace

GroundTheory ground_program(const Program& p, const FactSource& source,
                            const EvalOptions& opts) {
    Grounder g(p, source, opts);
    return g.run();
}

bool theory_satisfiable(const GroundTheory& t,
                        const std::vector<std::int32_t>& forced_false,
                        const EvalOptions& opts) {
    Solver solver(t, opts);
    return solver.satisfiable(forced_false);
}

bool ddlog_holds(const Program& p, const FactSource& source, const EvalOptions& opts) {
    GroundTheory t = ground_program(p, source, opts);
    Atom goal{p.goal, {}};
    auto it = t.atom_ids.find(goal);
    Solver solver(t, opts);
    if (it == t.atom_ids.end()) return !solver.satisfiable({});
    return !solver.satisfiable({it->second});
}

bool ddlog_holds(const Program& p, const Instance& instance, const EvalOptions& opts) {
    return ddlog_holds(p, FactSource::of(instance), opts);
}

TupleSet ddlog_answers(const Program& p, const Instance& instance,
                       const EvalOptions& opts) {
    FactSource source = FactSource::of(instance);
    if (p.arity == 0) {
        TupleSet out;
        if (ddlog_holds(p, source, opts)) out.insert(Tuple{});
        return out;
    }
    GroundTheory t = ground_program(p, source, opts);
    Solver solver(t, opts);
    bool base_sat = solver.satisfiable({});

    std::uint64_t tuples = 1;
    for (int i = 0; i < p.arity; ++i) {
        tuples *= source.domain.size();
        if (tuples > opts.max_answer_tuples)
            throw LimitError("ddlog_answers", "candidate answer tuples", tuples,
                             opts.max_answer_tuples);
    }

    TupleSet out;
    Tuple tuple(p.arity);
    std::function<void(int)> rec = [&](int i) {
        if (i == p.arity) {
            Atom goal{p.goal, {}};
            for (const auto& c : tuple) goal.args.push_back(Term::cst(c));
            auto it = t.atom_ids.find(goal);
            if (it == t.atom_ids.end()) {
                if (!base_sat) out.insert(tuple);  // vacuously certain
                return;
            }
            if (!solver.satisfiable({it->second})) out.insert(tuple);
            return;
        }
        for (const auto& c : source.domain) {
            tuple[i] = c;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

InstanceEnumerator::InstanceEnumerator(Schema schema, int max_domain_size,
                                       Girth min_girth_exclusive,
                                       std::vector<std::string> pinned_constants,
                                       std::uint64_t node_budget)
    : schema_(std::move(schema)),
      pinned_(pinned_constants.begin(), pinned_constants.end()),
      min_girth_(min_girth_exclusive),
      budget_(node_budget) {
    if (max_domain_size > 4)
        throw LimitError("enum_instances", "max domain size", max_domain_size, 4);
    std::vector<std::string> consts(pinned_.begin(), pinned_.end());
    int generics = std::max(1, max_domain_size - (int)consts.size());
    for (int i = 1; (int)consts.size() < (int)pinned_.size() + generics; ++i) {
        std::string name = "c" + std::to_string(i);
        if (!pinned_.count(name)) consts.push_back(name);
    }
    std::sort(consts.begin(), consts.end());

    // Low arities first: the depth-first walk decides high indices first, so
    // cycle-capable facts sit near the root where girth pruning bites.
    std::vector<std::pair<int, std::string>> rels;
    for (const auto& [r, k] : schema_.relations) rels.push_back({k, r});
    std::sort(rels.begin(), rels.end());
    for (const auto& [arity, rel] : rels) {
        std::vector<int> odo(arity, 0);
        while (true) {
            Atom a{rel, {}};
            for (int i = 0; i < arity; ++i) a.args.push_back(Term::cst(consts[odo[i]]));
            universe_.push_back(std::move(a));
            int i = arity - 1;
            while (i >= 0 && ++odo[i] == (int)consts.size()) odo[i--] = 0;
            if (i < 0) break;
            if (arity == 0) break;
        }
        if (arity == 0 && consts.empty()) continue;
    }
    bool filtered = !min_girth_.has_value() || *min_girth_ > 0;
    if (!filtered && universe_.size() > 30)
        throw LimitError("enum_instances", "fact universe", universe_.size(), 30);
    choice_.assign(universe_.size(), -1);
}

bool InstanceEnumerator::canonical(const Instance& instance) const {
    // Renaming generic constants by first occurrence must be the identity;
    // pinned constants map to themselves.
    std::map<std::string, std::string> rename;
    int next = 1;
    for (const auto& f : instance.facts)
        for (const auto& t : f.args) {
            if (pinned_.count(t.name)) continue;
            auto it = rename.find(t.name);
            if (it == rename.end()) {
                std::string fresh;
                do {
                    fresh = "c" + std::to_string(next++);
                } while (pinned_.count(fresh));
                it = rename.emplace(t.name, std::move(fresh)).first;
            }
            if (it->second != t.name) return false;
        }
    return true;
}

std::optional<Instance> InstanceEnumerator::next() {
    const std::size_t n = universe_.size();
    if (done_) return std::nullopt;
    while (true) {
        if (depth_ == n) {
            Instance inst;
            inst.schema = schema_;
            for (const Atom* f : current_) inst.facts.insert(*f);
            // Advance to the next pending branch before returning.
            bool more = false;
            while (depth_ > 0) {
                std::size_t d = depth_ - 1;
                std::size_t idx = n - 1 - d;
                if (choice_[d] == 0) {
                    if (++nodes_ > budget_)
                        throw LimitError("enum_instances", "search nodes", nodes_, budget_);
                    current_.push_back(&universe_[idx]);
                    bool ok = true;
                    if (!min_girth_.has_value() || *min_girth_ > 0)
                        ok = girth_exceeds(girth_of(current_), min_girth_);
                    if (ok) {
                        choice_[d] = 1;
                        more = true;
                        break;
                    }
                    current_.pop_back();
                    choice_[d] = 2;
                    --depth_;
                } else {
                    if (choice_[d] == 1) current_.pop_back();
                    choice_[d] = -1;
                    --depth_;
                }
            }
            if (!more && depth_ == 0) done_ = true;
            if (canonical(inst)) return inst;
            if (done_) return std::nullopt;
            continue;
        }
        if (++nodes_ > budget_)
            throw LimitError("enum_instances", "search nodes", nodes_, budget_);
        choice_[depth_] = 0;
        ++depth_;
    }
}

std::vector<Instance> all_instances(const Schema& schema, int max_domain_size,
                                    Girth min_girth_exclusive) {
    InstanceEnumerator e(schema, max_domain_size, min_girth_exclusive);
    std::vector<Instance> out;
    while (auto i = e.next()) out.push_back(std::move(*i));
    return out;
}

}  // namespace mdc
