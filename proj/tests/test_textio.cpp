#include "doctest.h"

#include "mdc/textio.hpp"
#include "testsupport.hpp"

using namespace mdc;
using namespace mdc::test;

TEST_CASE("parse a disjunctive rule") {
    Program p = prog("A1(X) | A2(X) :- A(X).\n");
    REQUIRE(p.rules.size() == 1);
    const Rule& r = p.rules.front();
    CHECK(r.head.size() == 2);
    CHECK(r.head[0].relation == "A1");
    CHECK(r.head[1].relation == "A2");
    CHECK(r.body.size() == 1);
    CHECK(r.body[0].args[0].is_var());
}

TEST_CASE("goal in a body is a parse error") {
    CHECK_THROWS_AS((void)prog("goal(X) :- goal(X).\n"), ParseError);
}

TEST_CASE("false makes an empty head") {
    Program p = prog("false :- P(X), Q(X).\n");
    REQUIRE(p.rules.size() == 1);
    CHECK(p.rules.front().head.empty());
    CHECK(p.rules.front().body.size() == 2);
}

TEST_CASE("lexical case decides term kind") {
    Program p = prog("goal(X) :- r(X,a).\n");
    const Atom& a = p.rules.front().body.front();
    CHECK(a.args[0].is_var());
    CHECK(!a.args[1].is_var());
}

TEST_CASE("arity mismatch against first use is rejected") {
    CHECK_THROWS_AS((void)prog("goal() :- r(X,Y), r(X).\n"), ParseError);
    CHECK_THROWS_AS((void)inst("r(a,b). r(a).\n"), ParseError);
}

TEST_CASE("head variable must occur in the body") {
    CHECK_THROWS_AS((void)prog("P(Y) :- A(X).\n"), ParseError);
}

TEST_CASE("parse a ground instance") {
    Instance i = inst("r(a,a). A(a).\n");
    CHECK(i.facts.size() == 2);
    CHECK(i.adom() == std::set<std::string>{"a"});
}

TEST_CASE("empty instance file") {
    Instance i = inst("");
    CHECK(i.facts.empty());
    CHECK(i.adom().empty());
}

TEST_CASE("variables in facts are rejected") {
    CHECK_THROWS_AS((void)inst("r(X,a).\n"), ParseError);
}

TEST_CASE("nullary facts parse") {
    Instance i = inst("P().\n");
    CHECK(i.facts.count(Atom{"P", {}}));
}

TEST_CASE("comments and spans") {
    Program p = prog("% a comment\ngoal() :- A(X).\n");
    CHECK(p.rules.size() == 1);
    try {
        (void)prog("goal() :- A(X).\ngoal() :- A(X,Y).\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.span.line == 2);
    }
}

TEST_CASE("program round trip") {
    const char* texts[] = {
        "A1(X) | A2(X) :- A(X).\ngoal(X) :- A1(X), r(X,Y), A1(Y).\n",
        "false :- P(X), Q(X).\ngoal() :- P(X).\n",
        "goal() :- edb$q0(X,Y), gen$q1(X), neg$P(Y).\n",
        "goal() :- cst$a(X), p2$A1(X).\n",
        "goal(X) :- r(X,fresh$1).\n",
        "query$goal() :- r(X,Y), jump(X,Y).\n",
    };
    for (const char* t : texts) {
        Program p = prog(t);
        Program q = prog(render_program(p));
        p.normalize();
        q.normalize();
        CHECK(render_program(p) == render_program(q));
        CHECK(p.goal == q.goal);
    }
}

TEST_CASE("query programs keep their goal relation") {
    Program p = prog("query$goal() :- r(X,Y).\n");
    CHECK(p.goal == "query$goal");
}

TEST_CASE("instance round trip") {
    Instance i = inst("r(a,b). A(a). P(). edb$q0(a,b,c).\n");
    CHECK(parse_instance(render_instance(i)).facts == i.facts);
}

TEST_CASE("three-colorability sentence parses to four clauses") {
    const char* text =
        "exists R G B . forall x y .\n"
        "  true -> R(x) | G(x) | B(x) ;\n"
        "  R(x) & r(x,y) & R(y) -> false ;\n"
        "  G(x) & r(x,y) & G(y) -> false ;\n"
        "  B(x) & r(x,y) & B(y) -> false\n";
    MMSNPSentence phi = parse_mmsnp(text);
    CHECK(phi.so_vars == std::vector<std::string>{"R", "G", "B"});
    CHECK(phi.clauses.size() == 4);
    CHECK(phi.clauses[0].alphas.empty());
    CHECK(phi.clauses[0].betas.size() == 3);
    CHECK(phi.edb_schema.relations == std::map<std::string, int>{{"r", 2}});
}

TEST_CASE("minimal sentence") {
    MMSNPSentence phi = parse_mmsnp("exists X . forall y . true -> X(y)\n");
    CHECK(phi.clauses.size() == 1);
}

TEST_CASE("EDB atom on the right of an implication is rejected") {
    CHECK_THROWS_AS((void)parse_mmsnp("exists X . forall x y . true -> r(x,y)\n"),
                    ParseError);
}

TEST_CASE("undeclared variable is rejected") {
    CHECK_THROWS_AS((void)parse_mmsnp("exists X . forall y . X(z) -> false\n"),
                    ParseError);
}

TEST_CASE("mmsnp round trip") {
    const char* text =
        "exists R G B . forall x y .\n"
        "  true -> R(x) | G(x) | B(x) ;\n"
        "  R(x) & r(x,y) & R(y) -> false\n";
    MMSNPSentence phi = parse_mmsnp(text);
    CHECK(parse_mmsnp(render_mmsnp(phi)) == phi);
}

TEST_CASE("tiling round trip") {
    const char* text =
        "% two tiles\n"
        "tiles: T1 T2\n"
        "h: T1 T2\n"
        "v: T2 T1\n"
        "word: T1\n";
    auto [problem, input] = parse_tiling(text);
    CHECK(problem.tiles.size() == 2);
    CHECK(problem.horizontal.count({"T1", "T2"}));
    CHECK(input.word == std::vector<std::string>{"T1"});
    auto [p2, i2] = parse_tiling(render_tiling(problem, input));
    CHECK(p2.tiles == problem.tiles);
    CHECK(p2.horizontal == problem.horizontal);
    CHECK(p2.vertical == problem.vertical);
    CHECK(i2.word == input.word);
}

TEST_CASE("parser is total on noise") {
    Rng rng(12345);
    const std::string alphabet = "abXY(),.:-|;&%->$ \n\tgoalfalse";
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        int len = rng.below(40);
        for (int i = 0; i < len; ++i) text += alphabet[rng.below((int)alphabet.size())];
        try {
            (void)parse_program(text);
        } catch (const ParseError&) {
        }
        try {
            (void)parse_instance(text);
        } catch (const ParseError&) {
        }
        try {
            (void)parse_mmsnp(text);
        } catch (const ParseError&) {
        } catch (const Error&) {
        }
        try {
            (void)parse_tiling(text);
        } catch (const ParseError&) {
        }
    }
    CHECK(true);
}
