#ifndef MDC_EMPTINESS_HPP
#define MDC_EMPTINESS_HPP

#include "mdc/base.hpp"
#include "mdc/eval.hpp"
#include "mdc/reduce.hpp"

namespace mdc {

// Sets of nullary (resp. unary) disjointness relations avoiding every
// forbidden co-occurrence.
struct ZeroType {
    std::set<std::string> relations;

    auto operator<=>(const ZeroType&) const = default;
};
using OneType = std::set<std::string>;

std::vector<ZeroType> zero_types(const DisjointnessSet& d);
std::vector<OneType> one_types(const DisjointnessSet& d);

struct EmptinessOptions {
    EvalOptions eval;
    std::uint64_t max_elements = 16384;
    bool parallel = true;
};

// The universal test instance for theta: one element per 1-type, full
// interpretations for the EDB relations outside the disjointness schema.
// Materializes those relations, so only suitable at desk scale; check_empty
// itself keeps them implicit.
Instance build_k_theta(const Schema& edb_schema, const DisjointnessSet& d,
                       const ZeroType& theta,
                       const EmptinessOptions& opts = {});

struct EmptinessResult {
    bool empty = true;
    std::optional<ZeroType> witness_theta;      // set when non-empty
    std::optional<Instance> witness_k_theta;    // materialized when in guard range
};

// Relativized emptiness: p (semi-simple w.r.t. d) holds on no d-satisfying
// instance iff it fails on every K_theta.
EmptinessResult check_empty(const Program& p, const DisjointnessSet& d,
                            const EmptinessOptions& opts = {});
EmptinessResult check_empty_serial(const Program& p, const DisjointnessSet& d,
                                   const EmptinessOptions& opts = {});

// CSP view: templates such that an instance of 0-type theta fails p exactly
// when it maps homomorphically into one of them.
std::vector<Instance> build_templates(const Program& p, const DisjointnessSet& d,
                                      const ZeroType& theta,
                                      const EmptinessOptions& opts = {});

// Cross-check path: empty iff every K_theta maps into some template. Must
// agree with check_empty on every input.
bool check_empty_via_templates(const Program& p, const DisjointnessSet& d,
                               const EmptinessOptions& opts = {});

}  // namespace mdc

#endif
