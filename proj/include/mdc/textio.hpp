#ifndef MDC_TEXTIO_HPP
#define MDC_TEXTIO_HPP

#include "mdc/base.hpp"
#include "mdc/mmsnp.hpp"
#include "mdc/tilegen.hpp"

#include <string>
#include <utility>

namespace mdc {

// Rule syntax: `H1(X) | H2(X) :- B1(X,Y), B2(Y).` with `false` for the empty
// head. Argument case decides term kind: uppercase first letter is a variable,
// anything else a constant. `%` starts a comment. The goal relation is the one
// literally named `goal` (or `query$goal` when only that occurs, so query
// programs round-trip).
Program parse_program(const std::string& text);
std::string render_program(const Program& p);

// Ground facts, one per statement: `r(a,b). A(a). P().`
Instance parse_instance(const std::string& text);
std::string render_instance(const Instance& instance);

// `exists X1 .. Xn . forall y1 .. ym . CLAUSE ; CLAUSE ; ...` where CLAUSE is
// `alpha & .. & alpha -> beta | .. | beta`, with `true` and `false` for the
// empty conjunction and disjunction.
MMSNPSentence parse_mmsnp(const std::string& text);
std::string render_mmsnp(const MMSNPSentence& phi);

// Line oriented: `tiles: T1 T2`, then `h: Ti Tj` / `v: Ti Tj` lines, then
// `word: Ti1 Ti2 ...`.
std::pair<TilingProblem, TilingInput> parse_tiling(const std::string& text);
std::string render_tiling(const TilingProblem& problem, const TilingInput& input);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace mdc

#endif
