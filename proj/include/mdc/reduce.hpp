#ifndef MDC_REDUCE_HPP
#define MDC_REDUCE_HPP

#include "mdc/base.hpp"

namespace mdc {

// Empty-headed rules forbidding co-occurrence of at-most-unary relations on
// one element (or of nullary relations).
struct DisjointnessSet {
    std::vector<Rule> rules;

    std::set<std::string> relations() const;
    std::set<std::string> relations(int arity) const;
    Program to_program(const Schema& schema) const;
};

bool satisfies(const Instance& instance, const DisjointnessSet& d);

struct ReductionResult {
    Program program;                            // semi-simple w.r.t. disjointness
    DisjointnessSet disjointness;
    std::map<std::string, std::string> mirror;  // P -> neg$P over the right IDBs
};

struct ReduceOptions {
    std::uint64_t max_rules = 2'000'000;
};

// The shared setup of the reduction: the right program with its IDBs renamed
// apart, the split of its IDB schema, and the disjointness constraints. The
// annotated program itself can be materialized (to_emptiness) or walked
// lazily (the driver does, since annotation counts grow exponentially).
struct AnnotationSystem {
    Program left;
    Program right;  // IDBs carry the p2$ prefix
    std::vector<std::string> unary_idb2;
    std::vector<std::string> nullary_idb2;  // without the right goal
    std::string right_goal;
    DisjointnessSet disjointness;
    Schema edb_prime;  // shared EDB schema plus right IDBs and their mirrors
};

AnnotationSystem make_annotation_system(const Program& p1, const Program& p2);

// Containment of two simple programs as relativized emptiness: annotate the
// left program's rules with right-IDB guesses, drop the annotations that
// violate a right rule, and pair with the P/neg$P disjointness constraints.
ReductionResult to_emptiness(const Program& p1, const Program& p2,
                             const ReduceOptions& opts = {});

// Does the removal step of the reduction delete this annotated rule? Exposed
// for the lazy walk.
bool removal_applies(const Rule& right_rule, const Rule& annotated);

}  // namespace mdc

#endif
