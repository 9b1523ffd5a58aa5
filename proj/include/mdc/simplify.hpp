#ifndef MDC_SIMPLIFY_HPP
#define MDC_SIMPLIFY_HPP

#include "mdc/base.hpp"
#include "mdc/eval.hpp"

namespace mdc {

// One consolidated EDB relation: edb$q<k> stands for the conjunction `cq`
// over canonical variables V0..V{arity-1}.
struct ConsolidationEntry {
    std::string relation;
    int arity = 0;
    std::vector<Atom> cq;
    std::vector<std::string> vars;  // argument order of the relation
};

struct ConsolidationMap {
    std::map<std::string, ConsolidationEntry> entries;  // canonical form -> entry

    const ConsolidationEntry* by_relation(const std::string& rel) const;
};

// Extends p with every rule obtained by applying a partition of a rule's
// variables. Rules with more than 8 variables are rejected.
Program close_under_identification(const Program& p);

// Exhaustively splits rule bodies at cut variables, variable-disjoint parts
// and reflexive EDB atoms co-occurring with other EDB atoms. Fresh gen$q<k>
// IDB relations are keyed by the canonical form of their defining fragment,
// shared through the registry so a jointly simplified pair never mints two
// names for one fragment.
Program biconnect(const Program& p, std::map<std::string, int>& fresh_registry);
Program biconnect(const Program& p);

// Replaces the EDB part of every rule body with a single consolidated EDB
// atom, closing under injective homomorphisms between the stored conjunctions.
// Both outputs are simple.
std::tuple<Program, Program, ConsolidationMap> consolidate(const Program& p1,
                                                           const Program& p2);

struct SimplifyResult {
    Program left;
    Program right;
    ConsolidationMap map;
    std::uint64_t atom_width = 0;  // of the original pair; the girth cutoff
};

SimplifyResult simplify_pair(const Program& p1, const Program& p2);

// Instance bridges between the original EDB schema and the consolidated one;
// test support for the correctness sweeps.
Instance to_consolidated(const Instance& instance, const ConsolidationMap& map);
Instance from_consolidated(const Instance& instance, const ConsolidationMap& map,
                           const Schema& original_edb);

}  // namespace mdc

#endif
