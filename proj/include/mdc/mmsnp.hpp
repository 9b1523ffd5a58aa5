#ifndef MDC_MMSNP_HPP
#define MDC_MMSNP_HPP

#include "mdc/base.hpp"

namespace mdc {

// One implication alpha_1 & ... & alpha_n -> beta_1 | ... | beta_m.
// Alphas are atoms over SO variables (unary) or EDB relations; betas mention
// SO variables only.
struct MMSNPClause {
    std::vector<Atom> alphas;
    std::vector<Atom> betas;

    auto operator<=>(const MMSNPClause&) const = default;
};

struct MMSNPSentence {
    std::vector<std::string> so_vars;
    std::vector<std::string> fo_vars;
    std::vector<MMSNPClause> clauses;
    Schema edb_schema;  // relations appearing in alphas that are not SO variables

    auto operator<=>(const MMSNPSentence&) const = default;
};

struct MMSNPOptions {
    std::size_t max_adom = 12;
};

// True iff some assignment of the SO variables to subsets of adom(I) satisfies
// every clause under every first-order assignment.
bool eval_mmsnp(const MMSNPSentence& phi, const Instance& instance,
                const MMSNPOptions& opts = {});

// Complement translation: the result fails on I exactly when I satisfies phi.
// Guess rules span `schema` so the program can be used over a larger EDB
// schema than the sentence mentions; defaults to the sentence's own schema.
Program mmsnp_to_mddlog(const MMSNPSentence& phi);
Program mmsnp_to_mddlog(const MMSNPSentence& phi, const Schema& schema);

// Inverse direction for Boolean programs whose non-goal IDBs are all unary.
MMSNPSentence mddlog_to_mmsnp(const Program& p);

}  // namespace mdc

#endif
