#ifndef MDC_BASE_HPP
#define MDC_BASE_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdc {

// Base error for everything in the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SourceSpan {
    int line = 1;
    int column = 1;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, SourceSpan where)
        : Error(msg + " (line " + std::to_string(where.line) + ", column " +
                std::to_string(where.column) + ")"),
          span(where) {}
    SourceSpan span;
};

// Raised when a configurable resource guard trips. Carries the stage name and
// the measured quantity so callers can tell "too big" from "wrong".
class LimitError : public Error {
public:
    LimitError(const std::string& stage, const std::string& what_measured,
               std::uint64_t measured, std::uint64_t limit)
        : Error(stage + ": " + what_measured + " " + std::to_string(measured) +
                " exceeds limit " + std::to_string(limit)),
          stage(stage),
          quantity(what_measured),
          measured(measured),
          limit(limit) {}
    std::string stage;
    std::string quantity;
    std::uint64_t measured;
    std::uint64_t limit;
};

enum class TermKind : std::uint8_t { Variable, Constant };

struct Term {
    TermKind kind = TermKind::Constant;
    std::string name;

    static Term var(std::string n) { return {TermKind::Variable, std::move(n)}; }
    static Term cst(std::string n) { return {TermKind::Constant, std::move(n)}; }
    bool is_var() const { return kind == TermKind::Variable; }

    auto operator<=>(const Term&) const = default;
};

struct Atom {
    std::string relation;
    std::vector<Term> args;

    auto operator<=>(const Atom&) const = default;
    bool ground() const;
};

// head may be empty: that is the bottom head, written `false :-`.
struct Rule {
    std::vector<Atom> head;
    std::vector<Atom> body;

    auto operator<=>(const Rule&) const = default;

    std::set<std::string> variables() const;
    std::set<std::string> constants() const;
};

struct Schema {
    std::map<std::string, int> relations;  // name -> arity

    bool contains(const std::string& r) const { return relations.count(r) != 0; }
    int arity_of(const std::string& r) const;
    // Adds r/arity; throws on arity conflict.
    void declare(const std::string& r, int arity);
    // Union of two schemas; throws on arity conflict.
    static Schema merged(const Schema& a, const Schema& b);

    auto operator<=>(const Schema&) const = default;
};

struct Program {
    Schema schema;  // every relation the program mentions, EDB and IDB
    std::vector<Rule> rules;
    std::string goal = "goal";
    int arity = 0;
    // IDB relations inherited from an earlier pipeline stage; rule filtering
    // (goal specialization, annotation removal) can drop every head
    // occurrence of a relation without changing its classification.
    std::set<std::string> forced_idb;

    std::set<std::string> idb_relations() const;  // head relations plus goal
    std::set<std::string> edb_relations() const;
    Schema edb_schema() const;

    void add_rule(Rule r);  // declares relations from first use, keeps order

    // Canonical-dedup the rule set and sort by canonical key. Rule sets are
    // identified up to variable renaming and atom reordering; without this the
    // identification closure explodes.
    void normalize();
};

struct Instance {
    Schema schema;
    std::set<Atom> facts;  // ground atoms only

    std::set<std::string> adom() const;
    void add_fact(Atom a);  // declares relation from first use, checks groundness
};

// Size measures; relation and variable names count as length one.
struct Metrics {
    std::uint64_t size = 0;
    std::uint64_t rule_size = 0;
    std::uint64_t atom_width = 0;
    std::uint64_t variable_width = 0;
};

struct ValidationReport {
    bool ok = false;           // all invariants hold, including monadicity
    bool mddlog = false;       // all IDBs except goal have arity <= 1
    std::vector<std::string> violations;
    Metrics metrics;
};

Metrics compute_metrics(const Program& p);
ValidationReport validate_program(const Program& p);

// Canonical serialization of a conjunction of atoms, identical for any two
// bodies equal up to variable renaming and atom reordering. Computed by
// enumerating variable orderings and keeping the lexicographically least
// rendering. Rejects bodies with more than 12 variables.
std::string canonical_cq(const std::vector<Atom>& body);

// Same canonicalization over a whole rule (body plus sorted head); the dedup
// key used by Program::normalize.
std::string canonical_rule_key(const Rule& r);

// A rule body plus head rewritten with canonical variable names v0,v1,...
Rule canonical_rule(const Rule& r);

// Simple form: every rule has at most one EDB atom, that atom carries every
// body variable exactly once, and EDB-free rules use at most one variable.
bool is_simple(const Program& p);

// Simple after reclassifying every relation that occurs in `disjointness_rules`
// as IDB.
bool is_semi_simple(const Program& p, const std::vector<Rule>& disjointness_rules);

// Helpers shared across modules.
std::set<std::string> atom_variables(const Atom& a);
bool reserved_name(const std::string& name);  // uses one of the generated-name prefixes

}  // namespace mdc

#endif
