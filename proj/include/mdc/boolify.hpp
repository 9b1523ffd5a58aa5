#ifndef MDC_BOOLIFY_HPP
#define MDC_BOOLIFY_HPP

#include "mdc/base.hpp"

namespace mdc {

struct ConstantTuple {
    std::vector<std::string> constants;

    auto operator<=>(const ConstantTuple&) const = default;
};

// The shared constant pool: constants of both programs plus `arity` fresh
// ones named fresh$1..fresh$k, and all tuples over it in sorted order.
std::vector<std::string> constant_pool(const Program& p1, const Program& p2);
std::vector<ConstantTuple> constant_tuples(const Program& p1, const Program& p2);

// Fixes the answer tuple: goal rules with incompatible repeated variables are
// discarded, the rest get the tuple substituted in and a nullary goal.
Program specialize_goal(const Program& p, const ConstantTuple& tuple);

struct BooleanBranch {
    ConstantTuple tuple;
    Program left;
    Program right;
};

std::vector<BooleanBranch> strip_answer_vars(const Program& p1, const Program& p2);

// Replaces rule constants with monadic cst$a marker relations over a shared
// extended EDB schema; the right program also flags elements carrying two
// different marks. Results are constant-free with containment preserved.
std::pair<Program, Program> eliminate_constants(const Program& p1, const Program& p2);

// Instance bridges for the constant elimination, used by the fidelity sweeps:
// mark every pool constant in the active domain, and conversely drop marks and
// merge elements marked alike (the merged element takes the mark's name).
Instance with_constant_marks(const Instance& instance,
                             const std::set<std::string>& constants);
Instance quotient_marked(const Instance& instance);

}  // namespace mdc

#endif
