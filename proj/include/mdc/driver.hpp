#ifndef MDC_DRIVER_HPP
#define MDC_DRIVER_HPP

#include "mdc/base.hpp"
#include "mdc/boolify.hpp"
#include "mdc/emptiness.hpp"
#include "mdc/eval.hpp"
#include "mdc/mmsnp.hpp"
#include "mdc/reduce.hpp"
#include "mdc/simplify.hpp"

namespace mdc {

struct StageStats {
    std::uint64_t branches = 0;
    std::uint64_t simplified_rules_left = 0;
    std::uint64_t simplified_rules_right = 0;
    std::uint64_t reduced_rules = 0;
    std::uint64_t disjointness_rules = 0;
    std::uint64_t zero_types = 0;
};

struct Decision {
    bool contained = false;
    // Non-containment always carries its evidence.
    std::optional<ConstantTuple> branch;
    std::optional<ZeroType> witness_theta;
    std::optional<Instance> witness_k_theta;
    // Best-effort unfolding of the winning K_theta back to the original EDB
    // schema. Only set when the unfolded instance could be re-checked against
    // the input pair; the K_theta instances have girth one, so certification
    // can legitimately fail while the verdict stands.
    std::optional<Instance> counterexample;
    std::optional<Tuple> counterexample_tuple;
    StageStats stats;
};

// Deterministic one-line rendering, the byte-comparison form for the
// determinism checks.
std::string describe(const Decision& d);

struct ContainOptions {
    EvalOptions eval;
    ReduceOptions reduce;
    std::uint64_t max_elements = 16384;
    bool parallel = true;
};

// Full pipeline: answer-variable stripping, constant elimination, joint
// simplification, reduction to relativized emptiness, K_theta checks.
Decision contain(const Program& p1, const Program& p2, const ContainOptions& opts = {});

// Logical implication of MMSNP sentences via the complement translation; the
// direction reverses under complementation.
Decision contain_mmsnp(const MMSNPSentence& phi1, const MMSNPSentence& phi2,
                       const ContainOptions& opts = {});

struct OracleResult {
    int max_domain = 0;
    std::optional<Instance> counterexample;
    std::optional<Tuple> tuple;

    bool found() const { return counterexample.has_value(); }
};

struct BruteOptions {
    EvalOptions eval;
    bool parallel = true;
    std::size_t batch = 64;
};

// Independent containment oracle: sweeps every instance up to max_domain
// constants (and exceeding the girth bound) for a tuple answered by the left
// program but not the right one. Returns the first hit in enumeration order.
OracleResult brute_contains(const Program& p1, const Program& p2, int max_domain,
                            Girth min_girth_exclusive = 0,
                            const BruteOptions& opts = {});
OracleResult brute_contains_serial(const Program& p1, const Program& p2,
                                   int max_domain, Girth min_girth_exclusive = 0,
                                   const BruteOptions& opts = {});

// The EDB schema both programs are compared over; throws when a relation is
// EDB in one program and IDB in the other or arities clash.
Schema unify_edb_schemas(const Program& p1, const Program& p2);

// Copies with the unified EDB schema attached.
std::pair<Program, Program> align_pair(const Program& p1, const Program& p2);

}  // namespace mdc

#endif
