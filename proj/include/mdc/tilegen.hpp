#ifndef MDC_TILEGEN_HPP
#define MDC_TILEGEN_HPP

#include "mdc/base.hpp"
#include "mdc/eval.hpp"

namespace mdc {

struct TilingProblem {
    std::vector<std::string> tiles;
    std::set<std::pair<std::string, std::string>> horizontal;
    std::set<std::pair<std::string, std::string>> vertical;

    bool has_tile(const std::string& t) const;
};

struct TilingInput {
    std::vector<std::string> word;

    int n() const { return (int)word.size(); }
    int m() const { return n() + 1; }
};

enum class QueryMode { Ucq, Cq };

struct LowerBound {
    Program program;
    UnionQuery query;  // two CQs in Ucq mode, one in Cq mode
};

// The tiling-to-containment reduction: program and query such that the
// program is contained in the query iff a tiling exists. Rejects n > 2.
LowerBound gen_lower_bound(const TilingProblem& problem, const TilingInput& input,
                           QueryMode mode);

// The instance representing the full grid with counting trees and navigation
// gadgets; no counting defect, so the generated query is false on it. Only
// n = 1 is in desk range.
Instance gen_canonical_grid(const TilingProblem& problem, const TilingInput& input,
                            QueryMode mode);

// A query rendered as a goal-rules-only program, for the .mddlog on-disk form.
Program query_as_program(const UnionQuery& q);
UnionQuery program_as_query(const Program& p);

}  // namespace mdc

#endif
