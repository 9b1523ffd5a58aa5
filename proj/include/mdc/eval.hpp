#ifndef MDC_EVAL_HPP
#define MDC_EVAL_HPP

#include "mdc/base.hpp"

#include <cstdint>
#include <functional>

namespace mdc {

using Tuple = std::vector<std::string>;
using TupleSet = std::set<Tuple>;

struct ConjunctiveQuery {
    std::vector<std::string> answer_vars;
    std::vector<Atom> atoms;
};

// Disjunction of CQs with the same answer arity.
struct UnionQuery {
    std::vector<ConjunctiveQuery> disjuncts;
};

// Girth values: nullopt stands for infinity (the instance is a tree).
using Girth = std::optional<int>;

// girth(I) > bound, where a bound of infinity keeps only trees and a bound of
// 0 keeps everything.
bool girth_exceeds(Girth g, Girth bound);

Girth girth(const Instance& instance);

struct Homomorphism {
    std::map<std::string, std::string> mapping;
};

std::optional<Homomorphism> find_hom(const Instance& from, const Instance& to);

TupleSet eval_cq(const ConjunctiveQuery& q, const Instance& instance);
TupleSet eval_ucq(const UnionQuery& q, const Instance& instance);

struct EvalOptions {
    std::uint64_t max_ground_clauses = 10'000'000;
    std::uint64_t max_solver_steps = 200'000'000;
    std::uint64_t max_answer_tuples = 1'000'000;
};

// Input facts for grounding: explicit facts plus relations interpreted as the
// full product over `domain`. The full relations never get materialized.
struct FactSource {
    const Instance* facts = nullptr;
    std::set<std::string> full_relations;
    std::vector<std::string> domain;

    static FactSource of(const Instance& instance);
};

struct GroundClause {
    std::vector<std::int32_t> body;  // ground IDB atoms that must all hold
    std::vector<std::int32_t> head;  // derived disjunction; empty for bottom
};

// Propositional image of Mod(p) restricted to IDB extensions over the domain.
// Clauses only come from rule instantiations whose EDB body atoms match
// fixed_facts (or a full relation of the source).
struct GroundTheory {
    std::vector<Atom> atom_table;  // ground IDB atoms, id = index
    std::vector<GroundClause> clauses;
    std::map<Atom, std::int32_t> atom_ids;
    Instance fixed_facts;
};

GroundTheory ground_program(const Program& p, const FactSource& source,
                            const EvalOptions& opts = {});

// Satisfiability of a ground theory with the given atoms forced false; also
// the search back end for eval_mmsnp.
bool theory_satisfiable(const GroundTheory& t,
                        const std::vector<std::int32_t>& forced_false,
                        const EvalOptions& opts = {});

// Certain answers: a tuple is an answer iff forcing goal(tuple) false makes the
// ground theory unsatisfiable.
TupleSet ddlog_answers(const Program& p, const Instance& instance,
                       const EvalOptions& opts = {});
bool ddlog_holds(const Program& p, const Instance& instance,
                 const EvalOptions& opts = {});
bool ddlog_holds(const Program& p, const FactSource& source,
                 const EvalOptions& opts = {});

// Streams every instance over constants c1..cN, N <= max_domain_size (at most
// 4), up to renaming of constants, filtered by girth exceeding
// min_girth_exclusive. Enumeration runs a depth-first walk over the fact
// universe that prunes a subtree as soon as the partial fact set already
// violates the girth bound (adding facts never increases girth). The emission
// order matches binary counting over the universe with index 0 as the least
// significant bit, so it is deterministic.
class InstanceEnumerator {
public:
    // `pinned_constants` take part in every instance's candidate domain by
    // name and are exempt from the renaming reduction; programs with
    // constants need them for a complete counterexample search.
    InstanceEnumerator(Schema schema, int max_domain_size,
                       Girth min_girth_exclusive = 0,
                       std::vector<std::string> pinned_constants = {},
                       std::uint64_t node_budget = 500'000'000);

    std::optional<Instance> next();

    const std::vector<Atom>& universe() const { return universe_; }

private:
    bool canonical(const Instance& instance) const;

    Schema schema_;
    std::vector<Atom> universe_;
    std::set<std::string> pinned_;
    Girth min_girth_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    std::vector<signed char> choice_;   // per depth: -1 unexplored, 0 out, 1 in
    std::vector<const Atom*> current_;  // included facts
    std::size_t depth_ = 0;
    bool done_ = false;
};

std::vector<Instance> all_instances(const Schema& schema, int max_domain_size,
                                    Girth min_girth_exclusive = 0);

}  // namespace mdc

#endif
