// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Budgets are asserted alongside the semantic checks.

#include "mdc/driver.hpp"
#include "mdc/emptiness.hpp"
#include "mdc/simplify.hpp"
#include "mdc/textio.hpp"
#include "mdc/tilegen.hpp"
#include "testsupport.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

using namespace mdc;
using namespace mdc::test;

namespace {

const char* kExample1Left =
    "A1(X) | A2(X) :- A(X).\n"
    "goal(X) :- A1(X), r(X,Y), A1(Y).\n"
    "goal(X) :- A2(X), r(X,Y), A2(Y).\n";
const char* kExample1LeftBool =
    "A1(X) | A2(X) :- A(X).\n"
    "goal() :- A1(X), r(X,Y), A1(Y).\n"
    "goal() :- A2(X), r(X,Y), A2(Y).\n";
const char* kExample1Right = "goal(X) :- B(X).\n";
const char* kThreeColSentence =
    "exists R G B . forall x y .\n"
    "  true -> R(x) | G(x) | B(x) ;\n"
    "  R(x) & r(x,y) & R(y) -> false ;\n"
    "  G(x) & r(x,y) & G(y) -> false ;\n"
    "  B(x) & r(x,y) & B(y) -> false\n";

struct Outcome {
    bool pass = true;
    std::string detail;
};

#define EXPECT(cond, message)                                    \
    do {                                                         \
        if (!(cond)) {                                           \
            out.pass = false;                                    \
            if (!out.detail.empty()) out.detail += "; ";         \
            out.detail += (message);                             \
            return out;                                          \
        }                                                        \
    } while (0)

std::string temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "mdc_acceptance";
    std::filesystem::create_directories(dir);
    return dir.string();
}

// Criterion 1: the running example through the CLI and the oracle, under a
// second.
Outcome criterion1() {
    Outcome out;
    std::string dir = temp_dir();
    write_file(dir + "/left.mddlog", kExample1Left);
    write_file(dir + "/right.mddlog", kExample1Right);

    const char* cli = std::getenv("MDC_CLI");
    EXPECT(cli != nullptr, "MDC_CLI not set (run through ctest)");
    std::string cmd = std::string("\"") + cli + "\" check --left " + dir +
                      "/left.mddlog --right " + dir + "/right.mddlog > " + dir +
                      "/check.out 2>/dev/null";
    int rc = std::system(cmd.c_str());
    EXPECT(WIFEXITED(rc) && WEXITSTATUS(rc) == 1, "check exit code is not 1");
    EXPECT(read_file(dir + "/check.out") == "NOT_CONTAINED\n",
           "check did not print NOT_CONTAINED");

    OracleResult r =
        brute_contains(prog(kExample1Left), prog(kExample1Right), 1);
    EXPECT(r.found(), "no witness at one constant");
    EXPECT(r.counterexample->facts == inst("A(c1). r(c1,c1).").facts,
           "witness differs from the expected instance");
    EXPECT(*r.tuple == Tuple{"c1"}, "witness tuple differs");
    return out;
}

// Criterion 2: no tree-shaped witness up to three constants.
Outcome criterion2() {
    Outcome out;
    OracleResult r = brute_contains(prog(kExample1Left), prog(kExample1Right), 3,
                                    Girth{});
    EXPECT(!r.found(), "found a tree-shaped counterexample");
    return out;
}

std::vector<MMSNPSentence> sweep_sentences() {
    std::vector<MMSNPSentence> out;
    out.push_back(parse_mmsnp(kThreeColSentence));
    Rng rng(2024);
    for (int i = 0; i < 10; ++i) out.push_back(random_sentence(rng));
    return out;
}

// Criterion 3: complementation of the translation on every small instance.
Outcome criterion3() {
    Outcome out;
    Schema r2;
    r2.declare("r", 2);
    auto instances = all_instances(r2, 3);
    std::uint64_t checks = 0;
    for (const auto& phi : sweep_sentences()) {
        Program p = mmsnp_to_mddlog(phi, r2);
        for (const auto& i : instances) {
            ++checks;
            EXPECT(eval_mmsnp(phi, i) != ddlog_holds(p, i),
                   "complementation violated on " + render_instance(i));
        }
    }
    out.detail = std::to_string(checks) + " checks";
    return out;
}

// Criterion 4: the round trip preserves truth on the same sweep.
Outcome criterion4() {
    Outcome out;
    Schema r2;
    r2.declare("r", 2);
    auto instances = all_instances(r2, 3);
    for (const auto& phi : sweep_sentences()) {
        MMSNPSentence back = mddlog_to_mmsnp(mmsnp_to_mddlog(phi, r2));
        for (const auto& i : instances)
            EXPECT(eval_mmsnp(phi, i) == eval_mmsnp(back, i),
                   "round trip changed truth on " + render_instance(i));
    }
    return out;
}

// Criterion 5: simplification fidelity on small Boolean pairs.
Outcome criterion5() {
    Outcome out;
    const std::pair<const char*, const char*> pairs[] = {
        {kExample1LeftBool, "goal() :- B(X).\n"},
        {"goal() :- B(X).\n", kExample1LeftBool},
        {kExample1LeftBool, kExample1LeftBool},
        {"goal() :- r(X,Y), r(Y,Z).\n", "goal() :- r(X,Y).\n"},
        {"goal() :- r(X,Y).\n", "goal() :- r(X,Y), r(Y,Z).\n"},
        {"goal() :- r(X,X).\n", "goal() :- r(X,Y), r(Y,X).\n"},
        {"goal() :- r(X,Y), r(Y,X).\n", "goal() :- r(X,X).\n"},
        {"P(X) | Q(X) :- A(X).\ngoal() :- P(X), r(X,Y), Q(Y).\n",
         "goal() :- A(X), r(X,Y), A(Y).\n"},
        {"goal() :- A(X).\nfalse :- B(X).\n", "goal() :- A(X), B(X).\n"},
        {"P(X3) :- A(X1), r(X1,X2), r(X2,X3), r(X3,X1).\n"
         "goal() :- r(X1,X2), r(X2,X3), r(X3,X1), P(X1), P(X2), P(X3).\n",
         "goal() :- A(X), r(X,Y).\n"},
    };
    for (const auto& [lt, rt] : pairs) {
        auto [a1, a2] = align_pair(prog(lt), prog(rt));
        SimplifyResult s = simplify_pair(a1, a2);

        Metrics m1 = compute_metrics(a1), m2 = compute_metrics(a2);
        Metrics s1 = compute_metrics(s.left), s2 = compute_metrics(s.right);
        auto ceiling = [](const Metrics& m, std::uint64_t rules) {
            long double z =
                (long double)rules * std::pow(2.0L, (long double)m.rule_size);
            return 64.0L * z * z * z * z + 64;
        };
        EXPECT((long double)s1.size <= ceiling(m1, a1.rules.size()),
               "left size ceiling violated");
        EXPECT((long double)s2.size <= ceiling(m2, a2.rules.size()),
               "right size ceiling violated");
        // Joint consolidation re-emits rules over relations introduced for
        // the partner program, so the width bound is the pair's joint width.
        std::uint64_t joint_width =
            std::max<std::uint64_t>({1, m1.variable_width, m2.variable_width});
        EXPECT(s1.variable_width <= joint_width, "left variable width grew");
        EXPECT(s2.variable_width <= joint_width, "right variable width grew");
        EXPECT(is_simple(s.left) && is_simple(s.right), "outputs not simple");

        // Point 1 via the bridge: an original counterexample transfers.
        OracleResult orig = brute_contains(a1, a2, 3);
        if (orig.found()) {
            Instance bridged = to_consolidated(*orig.counterexample, s.map);
            EXPECT(ddlog_holds(s.left, bridged),
                   "bridged witness lost the left program");
            EXPECT(!ddlog_holds(s.right, bridged),
                   "bridged witness gained the right program");
        }
        // Point 2 via the bridge: a high-girth simplified counterexample
        // transfers back.
        OracleResult simp =
            brute_contains(s.left, s.right, 3, Girth{(int)s.atom_width});
        if (simp.found()) {
            Instance back =
                from_consolidated(*simp.counterexample, s.map, a1.edb_schema());
            EXPECT(ddlog_holds(a1, back), "unfolded witness lost the left program");
            EXPECT(!ddlog_holds(a2, back),
                   "unfolded witness gained the right program");
            EXPECT(orig.found(), "original sweep missed the transferred witness");
        }
    }
    return out;
}

// Shared generator for criteria 6 and 7.
std::pair<Program, DisjointnessSet> random_system(Rng& rng) {
    Program p;
    p.goal = "goal";
    p.schema.declare("P", 1);
    p.schema.declare("Q", 1);
    p.schema.declare("r", 2);
    p.schema.declare("goal", 0);
    std::vector<std::string> decor{"P", "Q", "I1", "I2"};
    std::vector<std::string> heads{"I1", "I2"};
    std::set<std::string> idb_in_body, idb_in_head;
    int rules = 1 + rng.below(4);
    for (int i = 0; i < rules; ++i) {
        Rule r;
        std::vector<std::string> vars;
        if (rng.coin()) {
            r.body.push_back(Atom{"r", {Term::var("X"), Term::var("Y")}});
            vars = {"X", "Y"};
        } else {
            vars = {"X"};
        }
        int extra = (vars.size() == 1 ? 1 : 0) + rng.below(3);
        for (int j = 0; j < extra; ++j) {
            const std::string& rel = rng.pick(decor);
            if (rel[0] == 'I') idb_in_body.insert(rel);
            r.body.push_back(Atom{rel, {Term::var(rng.pick(vars))}});
        }
        switch (rng.below(4)) {
            case 0:
                r.head.push_back(Atom{"goal", {}});
                break;
            case 1:
                break;
            default: {
                const std::string& h1 = rng.pick(heads);
                idb_in_head.insert(h1);
                r.head.push_back(Atom{h1, {Term::var(rng.pick(vars))}});
                break;
            }
        }
        p.add_rule(std::move(r));
    }
    for (const auto& rel : idb_in_body)
        if (!idb_in_head.count(rel)) {
            Rule def;
            def.head = {Atom{rel, {Term::var("X")}}};
            def.body = {Atom{"P", {Term::var("X")}}};
            p.add_rule(std::move(def));
        }
    DisjointnessSet d;
    Rule excl;
    excl.body = {Atom{"P", {Term::var("X")}}, Atom{"Q", {Term::var("X")}}};
    d.rules.push_back(std::move(excl));
    return {p, d};
}

// Criterion 6: the K_theta check against exhaustive search.
Outcome criterion6() {
    Outcome out;
    Rng rng(6066);
    for (int trial = 0; trial < 20; ++trial) {
        auto [p, d] = random_system(rng);
        EmptinessResult res = check_empty(p, d);
        bool witness = false;
        for (const auto& i : all_instances(p.edb_schema(), 3)) {
            if (!satisfies(i, d)) continue;
            if (ddlog_holds(p, i)) {
                witness = true;
                break;
            }
        }
        EXPECT(res.empty == !witness,
               "emptiness disagrees with the sweep on\n" + render_program(p));
    }
    return out;
}

// Criterion 7: the template route agrees, pointwise and in aggregate.
Outcome criterion7() {
    Outcome out;
    Rng rng(6066);  // the same twenty systems
    for (int trial = 0; trial < 20; ++trial) {
        auto [p, d] = random_system(rng);
        EXPECT(check_empty(p, d).empty == check_empty_via_templates(p, d),
               "routes disagree on\n" + render_program(p));
        auto templates = build_templates(p, d, ZeroType{});
        for (const auto& i : all_instances(p.edb_schema(), 2)) {
            bool maps = false;
            for (const auto& t : templates)
                if (find_hom(i, t).has_value()) {
                    maps = true;
                    break;
                }
            EXPECT(maps == !ddlog_holds(p, i),
                   "pointwise template claim fails on " + render_instance(i));
        }
    }
    return out;
}

// Criterion 8: the full pipeline against the oracle on the curated corpus.
Outcome criterion8() {
    Outcome out;
    int used = 0;
    for (const auto& c : curated_corpus()) {
        Program p1 = prog(c.left);
        Program p2 = prog(c.right);
        ++used;
        Decision d = contain(p1, p2);
        EXPECT(d.contained == c.contained,
               std::string("verdict differs on pair: ") + c.name);
        OracleResult r = brute_contains(p1, p2, 3);
        EXPECT(r.found() == !c.contained,
               std::string("oracle differs on pair: ") + c.name);
        if (!d.contained) {
            EXPECT(d.branch && d.witness_theta,
                   std::string("missing evidence on pair: ") + c.name);
        }
    }
    out.detail = std::to_string(used) + " pairs";
    EXPECT(used >= 10, "not enough corpus pairs");
    return out;
}

// Criterion 9: the tiling generator's semantics at n = 1.
Outcome criterion9() {
    Outcome out;
    EvalOptions opts;
    opts.max_ground_clauses = 10'000'000;

    TilingProblem trivial;
    trivial.tiles = {"T1"};
    trivial.horizontal = {{"T1", "T1"}};
    trivial.vertical = {{"T1", "T1"}};
    TilingInput word;
    word.word = {"T1"};

    LowerBound lb = gen_lower_bound(trivial, word, QueryMode::Ucq);
    Instance grid = gen_canonical_grid(trivial, word, QueryMode::Ucq);
    EXPECT(eval_ucq(lb.query, grid).empty(), "(a) clean grid satisfies the query");
    EXPECT(!ddlog_holds(lb.program, grid, opts),
           "(a) all-match program holds on the grid");

    TilingProblem no_h = trivial;
    no_h.horizontal.clear();
    LowerBound lb2 = gen_lower_bound(no_h, word, QueryMode::Ucq);
    Instance grid2 = gen_canonical_grid(no_h, word, QueryMode::Ucq);
    EXPECT(eval_ucq(lb2.query, grid2).empty(), "(b) clean grid satisfies the query");
    EXPECT(ddlog_holds(lb2.program, grid2, opts),
           "(b) program fails on the grid despite the empty matching relation");

    Instance corrupted = grid;
    Atom target{"B2", {Term::cst("g10aa")}};
    EXPECT(corrupted.facts.count(target) == 1, "(c) expected leaf label missing");
    corrupted.facts.erase(target);
    corrupted.facts.insert(Atom{"B2bar", {Term::cst("g10aa")}});
    EXPECT(!eval_ucq(lb.query, corrupted).empty(),
           "(c) corrupted grid not caught by the query");

    // The single-query mode behaves the same way.
    LowerBound lbc = gen_lower_bound(trivial, word, QueryMode::Cq);
    Instance gridc = gen_canonical_grid(trivial, word, QueryMode::Cq);
    EXPECT(eval_ucq(lbc.query, gridc).empty(), "(a/cq) clean grid matches the query");
    EXPECT(!ddlog_holds(lbc.program, gridc, opts),
           "(a/cq) all-match program holds on the grid");
    LowerBound lbc2 = gen_lower_bound(no_h, word, QueryMode::Cq);
    Instance gridc2 = gen_canonical_grid(no_h, word, QueryMode::Cq);
    EXPECT(eval_ucq(lbc2.query, gridc2).empty(), "(b/cq) clean grid matches the query");
    EXPECT(ddlog_holds(lbc2.program, gridc2, opts), "(b/cq) program fails on the grid");
    return out;
}

// Criterion 10: certain answers are preserved along homomorphisms.
Outcome criterion10() {
    Outcome out;
    Rng rng(1010);
    int found = 0;
    int attempts = 0;
    while (found < 200 && attempts < 20000) {
        ++attempts;
        Program p = random_program(rng);
        Instance i = random_instance(rng, p.edb_schema(), 2);
        Instance j = random_instance(rng, p.edb_schema(), 2);
        auto h = find_hom(i, j);
        if (!h) continue;
        ++found;
        if (ddlog_holds(p, i))
            EXPECT(ddlog_holds(p, j), "preservation violated:\n" + render_program(p) +
                                          render_instance(i) + "->\n" +
                                          render_instance(j));
    }
    out.detail = std::to_string(found) + " triples";
    EXPECT(found == 200, "could not build 200 triples");
    return out;
}

// Criterion 11: two runs produce byte-identical verdict records.
std::string record_run() {
    std::ostringstream out;
    for (const auto& c : curated_corpus()) {
        Decision d = contain(prog(c.left), prog(c.right));
        out << c.name << ": " << describe(d) << "\n";
    }
    OracleResult r = brute_contains(prog(kExample1Left), prog(kExample1Right), 2);
    out << "brute: " << (r.found() ? render_instance(*r.counterexample) : "none")
        << "\n";
    return out.str();
}

Outcome criterion11() {
    Outcome out;
    EXPECT(record_run() == record_run(), "records differ between runs");
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, "running example reproduction", 1.0, criterion1},
        {2, "tree-witness absence", 60.0, criterion2},
        {3, "complement sweep", 300.0, criterion3},
        {4, "translation round trip", 300.0, criterion4},
        {5, "simplification fidelity", 600.0, criterion5},
        {6, "emptiness correctness", 600.0, criterion6},
        {7, "template cross-check", 600.0, criterion7},
        {8, "reduction bridges", 900.0, criterion8},
        {9, "tiling generator semantics", 900.0, criterion9},
        {10, "homomorphism preservation", 120.0, criterion10},
        {11, "determinism", 600.0, criterion11},
    };

    bool all_pass = true;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        if (secs > c.budget_s) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "" : "; ");
            out.detail += "over budget";
        }
        all_pass &= out.pass;
        std::printf("[%s] criterion %2d: %s (%.2fs%s%s)\n",
                    out.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    out.detail.empty() ? "" : ", ", out.detail.c_str());
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
