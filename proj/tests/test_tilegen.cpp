#include "doctest.h"

#include "mdc/textio.hpp"
#include "mdc/tilegen.hpp"
#include "testsupport.hpp"

using namespace mdc;
using namespace mdc::test;

namespace {

std::pair<TilingProblem, TilingInput> trivial_problem() {
    TilingProblem p;
    p.tiles = {"T1"};
    p.horizontal = {{"T1", "T1"}};
    p.vertical = {{"T1", "T1"}};
    TilingInput w;
    w.word = {"T1"};
    return {p, w};
}

std::pair<TilingProblem, TilingInput> no_h_problem() {
    TilingProblem p;
    p.tiles = {"T1"};
    p.vertical = {{"T1", "T1"}};
    TilingInput w;
    w.word = {"T1"};
    return {p, w};
}

bool program_has_rule(const Program& p, const std::string& rule_text) {
    std::string key = canonical_rule_key(prog(rule_text).rules.front());
    for (const auto& r : p.rules)
        if (canonical_rule_key(r) == key) return true;
    return false;
}

}  // namespace

TEST_CASE("the generated program carries the grid-activation rules verbatim") {
    auto [p, w] = trivial_problem();
    LowerBound lb = gen_lower_bound(p, w, QueryMode::Ucq);
    CHECK(validate_program(lb.program).ok);
    CHECK(validate_program(lb.program).mddlog);
    CHECK(program_has_rule(
        lb.program,
        "gactive(X) :- levG_0(X), r(X,Y), levG_0(Y), r(Y,X).\n"));
    CHECK(program_has_rule(lb.program, "T1(X) :- gactive(X).\n"));
    CHECK(program_has_rule(
        lb.program, "left(X) :- r(X,Y), r(Y,Z), jump(X,Z).\n"));
}

TEST_CASE("the union query has the two defect disjuncts") {
    auto [p, w] = trivial_problem();
    LowerBound lb = gen_lower_bound(p, w, QueryMode::Ucq);
    REQUIRE(lb.query.disjuncts.size() == 2);
    std::set<std::set<std::string>> endpoints;
    for (const auto& d : lb.query.disjuncts) {
        std::set<std::string> labels;
        for (const auto& a : d.atoms)
            if (a.relation[0] == 'B') labels.insert(a.relation);
        endpoints.insert(labels);
    }
    CHECK(endpoints.count({"B1", "B2bar"}));
    CHECK(endpoints.count({"B1bar", "B2"}));
}

TEST_CASE("the level-one navigation block matches the displayed scheme") {
    auto [p, w] = trivial_problem();
    LowerBound lb = gen_lower_bound(p, w, QueryMode::Ucq);
    const auto& atoms = lb.query.disjuncts.front().atoms;
    auto has = [&](const Atom& a) {
        return std::find(atoms.begin(), atoms.end(), a) != atoms.end();
    };
    CHECK(has(Atom{"jump", {Term::var("X1"), Term::var("Z1_3")}}));
    CHECK(has(Atom{"jump", {Term::var("Y1"), Term::var("Zp1_4")}}));
    // r-paths of lengths 3 and 4 from the shared source Z1_0.
    CHECK(has(Atom{"r", {Term::var("Z1_0"), Term::var("Z1_1")}}));
    CHECK(has(Atom{"r", {Term::var("Z1_2"), Term::var("Z1_3")}}));
    CHECK(has(Atom{"r", {Term::var("Z1_0"), Term::var("Zp1_1")}}));
    CHECK(has(Atom{"r", {Term::var("Zp1_3"), Term::var("Zp1_4")}}));
}

TEST_CASE("word length is guarded") {
    auto [p, w] = trivial_problem();
    w.word = {"T1", "T1", "T1"};
    CHECK_THROWS_AS((void)gen_lower_bound(p, w, QueryMode::Ucq), LimitError);
    w.word = {};
    CHECK_THROWS_AS((void)gen_lower_bound(p, w, QueryMode::Ucq), Error);
}

TEST_CASE("the canonical grid has sixteen grid nodes with proper trees") {
    auto [p, w] = trivial_problem();
    Instance grid = gen_canonical_grid(p, w, QueryMode::Ucq);
    // Grid nodes g00..g33 all present.
    auto adom = grid.adom();
    int grid_nodes = 0;
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
            grid_nodes += adom.count("g" + std::to_string(x) + std::to_string(y));
    CHECK(grid_nodes == 16);
    // The origin's leaves all carry zero bits for both counters.
    for (const char* leaf : {"g00aa", "g00ab", "g00ba", "g00bb"}) {
        CHECK(grid.facts.count(Atom{"B1bar", {Term::cst(leaf)}}));
        CHECK(grid.facts.count(Atom{"B2bar", {Term::cst(leaf)}}));
        CHECK(!grid.facts.count(Atom{"B1", {Term::cst(leaf)}}));
    }
    // Position (1,0): the first horizontal bit flips.
    CHECK(grid.facts.count(Atom{"B1", {Term::cst("g10aa")}}));
    CHECK(grid.facts.count(Atom{"B1bar", {Term::cst("g10ab")}}));
}

TEST_CASE("self step trees copy the counter pair") {
    auto [p, w] = trivial_problem();
    Instance grid = gen_canonical_grid(p, w, QueryMode::Ucq);
    // (Q1) implies (Q2) hinges on self-step trees carrying identical values.
    for (const char* leaf : {"g21saa", "g21sab", "g21sba", "g21sbb"}) {
        bool one = grid.facts.count(Atom{"B1", {Term::cst(leaf)}}) != 0;
        bool copied = grid.facts.count(Atom{"B2", {Term::cst(leaf)}}) != 0;
        CHECK(one == copied);
    }
}

TEST_CASE("the clean grid admits no counting defect") {
    auto [p, w] = trivial_problem();
    LowerBound lb = gen_lower_bound(p, w, QueryMode::Ucq);
    Instance grid = gen_canonical_grid(p, w, QueryMode::Ucq);
    CHECK(eval_ucq(lb.query, grid).empty());
}

TEST_CASE("corrupting one second-counter label creates a defect") {
    auto [p, w] = trivial_problem();
    LowerBound lb = gen_lower_bound(p, w, QueryMode::Ucq);
    Instance grid = gen_canonical_grid(p, w, QueryMode::Ucq);
    Instance corrupted = grid;
    // Flip the B2 value at one leaf of the (1,0) tree.
    Atom old_fact{"B2", {Term::cst("g10aa")}};
    REQUIRE(corrupted.facts.count(old_fact));
    corrupted.facts.erase(old_fact);
    corrupted.facts.insert(Atom{"B2bar", {Term::cst("g10aa")}});
    CHECK(!eval_ucq(lb.query, corrupted).empty());
}

TEST_CASE("cq mode swaps labels for bit gadgets") {
    auto [p, w] = trivial_problem();
    LowerBound lb = gen_lower_bound(p, w, QueryMode::Cq);
    REQUIRE(lb.query.disjuncts.size() == 1);
    CHECK(lb.program.schema.contains("jump1"));
    CHECK(lb.program.schema.contains("jump2"));
    CHECK(!lb.program.schema.contains("B1"));
    const auto& atoms = lb.query.disjuncts.front().atoms;
    int jump1 = 0, jump2 = 0;
    for (const auto& a : atoms) {
        if (a.relation == "jump1") ++jump1;
        if (a.relation == "jump2") ++jump2;
    }
    CHECK(jump1 == 1);
    CHECK(jump2 == 1);
    // Trailing r-chains of lengths m+2 and m+5 hang off the shared source.
    auto has = [&](const Atom& a) {
        return std::find(atoms.begin(), atoms.end(), a) != atoms.end();
    };
    CHECK(has(Atom{"r", {Term::var("W0"), Term::var("W1")}}));
    CHECK(has(Atom{"r", {Term::var("W3"), Term::var("W4")}}));
    CHECK(has(Atom{"r", {Term::var("W0"), Term::var("Wp1")}}));
    CHECK(has(Atom{"r", {Term::var("Wp6"), Term::var("Wp7")}}));
    CHECK(!has(Atom{"r", {Term::var("W4"), Term::var("W5")}}));

    Instance grid = gen_canonical_grid(p, w, QueryMode::Cq);
    // Four-step self loops: the two-step loop is gone.
    CHECK(grid.facts.count(Atom{"r", {Term::cst("g00"), Term::cst("g00s1")}}));
    CHECK(grid.facts.count(Atom{"r", {Term::cst("g00s3"), Term::cst("g00")}}));
    CHECK(!grid.facts.count(Atom{"r", {Term::cst("g00s1"), Term::cst("g00")}}));
}

TEST_CASE("generated artifacts round trip through the text formats") {
    auto [p, w] = no_h_problem();
    LowerBound lb = gen_lower_bound(p, w, QueryMode::Ucq);
    Program back = prog(render_program(lb.program));
    Program orig = lb.program;
    back.normalize();
    orig.normalize();
    CHECK(render_program(back) == render_program(orig));

    Program qp = query_as_program(lb.query);
    Program qback = prog(render_program(qp));
    CHECK(qback.goal == "query$goal");
    UnionQuery q2 = program_as_query(qback);
    CHECK(q2.disjuncts.size() == lb.query.disjuncts.size());

    Instance grid = gen_canonical_grid(p, w, QueryMode::Ucq);
    CHECK(parse_instance(render_instance(grid)).facts == grid.facts);
}

TEST_CASE("tile names must not collide with gadget relations") {
    TilingProblem p;
    p.tiles = {"gactive"};
    TilingInput w;
    w.word = {"gactive"};
    CHECK_THROWS_AS((void)gen_lower_bound(p, w, QueryMode::Ucq), Error);
}

TEST_CASE("cq mode grid semantics match the ucq mode") {
    auto [p, w] = no_h_problem();
    LowerBound lb = gen_lower_bound(p, w, QueryMode::Cq);
    Instance grid = gen_canonical_grid(p, w, QueryMode::Cq);
    EvalOptions opts;
    opts.max_ground_clauses = 10'000'000;
    CHECK(eval_ucq(lb.query, grid).empty());
    CHECK(ddlog_holds(lb.program, grid, opts));

    auto [pt, wt] = trivial_problem();
    LowerBound lbt = gen_lower_bound(pt, wt, QueryMode::Cq);
    Instance gridt = gen_canonical_grid(pt, wt, QueryMode::Cq);
    CHECK(eval_ucq(lbt.query, gridt).empty());
    CHECK(!ddlog_holds(lbt.program, gridt, opts));

    // Flipping the second counter's bit gadget at one leaf creates a defect.
    Instance corrupted = gridt;
    auto flip = [&corrupted](const std::string& leaf) {
        Atom one_a{"jump2", {Term::cst(leaf), Term::cst(leaf + "p1")}};
        Atom one_b{"jump2", {Term::cst(leaf), Term::cst(leaf + "p4")}};
        Atom zero_a{"jump2", {Term::cst(leaf), Term::cst(leaf + "p2")}};
        Atom zero_b{"jump2", {Term::cst(leaf), Term::cst(leaf + "p3")}};
        REQUIRE(corrupted.facts.count(zero_a));
        corrupted.facts.erase(zero_a);
        corrupted.facts.erase(zero_b);
        corrupted.facts.insert(one_a);
        corrupted.facts.insert(one_b);
    };
    flip("g00aa");  // value two of the origin's first leaf: zero becomes one
    CHECK(!eval_ucq(lbt.query, corrupted).empty());
}

TEST_CASE("generation works at word length two") {
    TilingProblem p;
    p.tiles = {"T1", "T2"};
    p.horizontal = {{"T1", "T2"}, {"T2", "T1"}};
    p.vertical = {{"T1", "T1"}, {"T2", "T2"}};
    TilingInput w;
    w.word = {"T1", "T2"};
    for (QueryMode mode : {QueryMode::Ucq, QueryMode::Cq}) {
        LowerBound lb = gen_lower_bound(p, w, mode);
        auto rep = validate_program(lb.program);
        CHECK(rep.ok);
        CHECK(rep.mddlog);
        // Depth-three counting trees: level relations go down to three.
        CHECK(lb.program.schema.contains("levG_3"));
        CHECK(lb.program.schema.contains("pos_1"));
        CHECK_THROWS_AS((void)gen_canonical_grid(p, w, mode), Error);
    }
}

TEST_CASE("the initial-condition cascade marks the origin") {
    // With every adjacency allowed a tiling always exists, so the generated
    // program fails on the clean grid. Banning the word tile at horizontal
    // position zero as well leaves no tile for the origin, which proves the
    // position relation is derived there.
    TilingProblem p;
    p.tiles = {"T1", "T2"};
    for (const auto& a : p.tiles)
        for (const auto& b : p.tiles) {
            p.horizontal.insert({a, b});
            p.vertical.insert({a, b});
        }
    TilingInput w;
    w.word = {"T1"};
    LowerBound lb = gen_lower_bound(p, w, QueryMode::Ucq);
    Instance grid = gen_canonical_grid(p, w, QueryMode::Ucq);
    EvalOptions opts;
    opts.max_ground_clauses = 10'000'000;
    CHECK(!ddlog_holds(lb.program, grid, opts));
    CHECK(program_has_rule(lb.program, "goal() :- pos_0(X), T2(X).\n"));

    Program banned = lb.program;
    banned.add_rule(prog("goal() :- pos_0(X), T1(X).\n").rules.front());
    CHECK(ddlog_holds(banned, grid, opts));
}

TEST_CASE("generated sizes follow the closed forms") {
    auto [p, w] = trivial_problem();
    // Navigation core: 1 + m^2 + 10m atoms and m^2 + 9m + 2 variables; the
    // two label atoms come on top of each disjunct.
    LowerBound ucq = gen_lower_bound(p, w, QueryMode::Ucq);
    for (const auto& d : ucq.query.disjuncts) {
        std::set<std::string> vars;
        for (const auto& a : d.atoms)
            for (const auto& t : a.args)
                if (t.is_var()) vars.insert(t.name);
        CHECK(d.atoms.size() == 27);
        CHECK(vars.size() == 24);
    }
    CHECK(ucq.program.rules.size() == 36);

    // The single-query mode adds the two anchored chains of lengths m+2 and
    // m+5 instead of the label atoms.
    LowerBound cq = gen_lower_bound(p, w, QueryMode::Cq);
    std::set<std::string> vars;
    for (const auto& a : cq.query.disjuncts.front().atoms)
        for (const auto& t : a.args)
            if (t.is_var()) vars.insert(t.name);
    CHECK(cq.query.disjuncts.front().atoms.size() == 38);
    CHECK(vars.size() == 36);

    TilingInput longer;
    longer.word = {"T1", "T1"};
    LowerBound deep = gen_lower_bound(p, longer, QueryMode::Ucq);
    std::set<std::string> dvars;
    for (const auto& a : deep.query.disjuncts.front().atoms)
        for (const auto& t : a.args)
            if (t.is_var()) dvars.insert(t.name);
    CHECK(deep.query.disjuncts.front().atoms.size() == 42);
    CHECK(dvars.size() == 38);
}
