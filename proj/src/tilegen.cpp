#include "mdc/tilegen.hpp"

#include <algorithm>
#include <cctype>

namespace mdc {

bool TilingProblem::has_tile(const std::string& t) const {
    return std::find(tiles.begin(), tiles.end(), t) != tiles.end();
}

namespace {

Term V(const std::string& name) { return Term::var(name); }

struct Gen {
    const TilingProblem& problem;
    const TilingInput& input;
    QueryMode mode;
    int m;
    Program p;
    int gadget_vars = 0;

    std::string lev(const std::string& family, int lang, int level) const {
        if (family == "G") return "levG_" + std::to_string(level);
        return "lev" + family + "_" + std::to_string(lang) + "_" + std::to_string(level);
    }

    // Body atoms asserting that counter `which` of leaf x carries `bit`.
    std::vector<Atom> leaf_bit(const std::string& x, int which, int bit) {
        if (mode == QueryMode::Ucq) {
            std::string rel = which == 1 ? (bit ? "B1" : "B1bar") : (bit ? "B2" : "B2bar");
            return {Atom{rel, {V(x)}}};
        }
        // Bit gadget: an r-path of length four from x whose jump relation
        // marks steps 1 and 4 for value one, steps 2 and 3 for value zero.
        std::string jmp = which == 1 ? "jump1" : "jump2";
        std::vector<std::string> u;
        for (int i = 1; i <= 4; ++i)
            u.push_back("G" + std::to_string(gadget_vars) + "_" + std::to_string(i));
        ++gadget_vars;
        std::vector<Atom> out;
        out.push_back(Atom{"r", {V(x), V(u[0])}});
        for (int i = 0; i < 3; ++i) out.push_back(Atom{"r", {V(u[i]), V(u[i + 1])}});
        if (bit) {
            out.push_back(Atom{jmp, {V(x), V(u[0])}});
            out.push_back(Atom{jmp, {V(x), V(u[3])}});
        } else {
            out.push_back(Atom{jmp, {V(x), V(u[1])}});
            out.push_back(Atom{jmp, {V(x), V(u[2])}});
        }
        return out;
    }

    void add(std::vector<Atom> head, std::vector<Atom> body) {
        Rule r;
        r.head = std::move(head);
        r.body = std::move(body);
        p.add_rule(std::move(r));
    }

    void leaf_rule(const std::string& rel, int b1, int b2) {
        gadget_vars = 0;
        std::vector<Atom> body = leaf_bit("X", 1, b1);
        for (auto& a : leaf_bit("X", 2, b2)) body.push_back(std::move(a));
        body.push_back(Atom{"lrok", {V("X")}});
        add({Atom{rel, {V("X")}}}, std::move(body));
    }

    void step_rule(const std::string& head, const std::string& left_rel,
                   const std::string& right_rel) {
        add({Atom{head, {V("X")}}},
            {Atom{"r", {V("X"), V("Y1")}}, Atom{left_rel, {V("Y1")}},
             Atom{"left", {V("Y1")}}, Atom{"r", {V("X"), V("Y2")}},
             Atom{right_rel, {V("Y2")}}, Atom{"right", {V("Y2")}}});
    }

    void counting_family(const std::string& family) {
        // Leaf symbols: L1 reads (0,1), L2 reads (1,0), L3 reads (1,1)|(0,0).
        leaf_rule(lev(family, 1, m), 0, 1);
        leaf_rule(lev(family, 2, m), 1, 0);
        leaf_rule(lev(family, 3, m), 1, 1);
        leaf_rule(lev(family, 3, m), 0, 0);
        static const int combos[4][3] = {{1, 1, 1}, {1, 2, 2}, {2, 3, 2}, {3, 3, 3}};
        for (int i = 1; i < m; ++i)
            for (const auto& c : combos)
                step_rule(lev(family, c[2], i), lev(family, c[0], i + 1),
                          lev(family, c[1], i + 1));
    }

    void build_tree_rules() {
        add({Atom{"left", {V("X")}}},
            {Atom{"r", {V("X"), V("Y")}}, Atom{"r", {V("Y"), V("Z")}},
             Atom{"jump", {V("X"), V("Z")}}});
        add({Atom{"right", {V("X")}}},
            {Atom{"r", {V("X"), V("Y")}}, Atom{"jump", {V("X"), V("Y")}}});
        add({Atom{"lrok", {V("X")}}}, {Atom{"left", {V("X")}}});
        add({Atom{"lrok", {V("X")}}}, {Atom{"right", {V("X")}}});

        leaf_rule(lev("G", 0, m), 1, 1);
        leaf_rule(lev("G", 0, m), 0, 0);
        for (int i = 0; i < m; ++i)
            step_rule(lev("G", 0, i), lev("G", 0, i + 1), lev("G", 0, i + 1));

        if (mode == QueryMode::Ucq) {
            add({Atom{"gactive", {V("X")}}},
                {Atom{lev("G", 0, 0), {V("X")}}, Atom{"r", {V("X"), V("Y")}},
                 Atom{lev("G", 0, 0), {V("Y")}}, Atom{"r", {V("Y"), V("X")}}});
        } else {
            // Self loops have length four here; all intermediate nodes carry
            // counting trees with identical counters.
            std::vector<Atom> body{Atom{lev("G", 0, 0), {V("X")}}};
            std::string prev = "X";
            for (int i = 1; i <= 3; ++i) {
                std::string cur = "Y" + std::to_string(i);
                body.push_back(Atom{"r", {V(prev), V(cur)}});
                body.push_back(Atom{lev("G", 0, 0), {V(cur)}});
                prev = cur;
            }
            body.push_back(Atom{"r", {V(prev), V("X")}});
            add({Atom{"gactive", {V("X")}}}, std::move(body));
        }

        counting_family("H");
        step_rule("hactive", lev("H", 2, 1), lev("H", 3, 1));
        counting_family("V");
        step_rule("vactive", lev("V", 3, 1), lev("V", 2, 1));
    }

    void build_tiling_rules() {
        std::vector<Atom> tile_head;
        for (const auto& t : problem.tiles) tile_head.push_back(Atom{t, {V("X")}});
        add(std::move(tile_head), {Atom{"gactive", {V("X")}}});

        for (const auto& a : problem.tiles)
            for (const auto& b : problem.tiles) {
                if (!problem.horizontal.count({a, b}))
                    add({Atom{"goal", {}}},
                        {Atom{a, {V("X")}}, Atom{"gactive", {V("X")}},
                         Atom{"r", {V("X"), V("Y")}}, Atom{"hactive", {V("Y")}},
                         Atom{"r", {V("Y"), V("Z")}}, Atom{b, {V("Z")}},
                         Atom{"gactive", {V("Z")}}});
                if (!problem.vertical.count({a, b}))
                    add({Atom{"goal", {}}},
                        {Atom{a, {V("X")}}, Atom{"gactive", {V("X")}},
                         Atom{"r", {V("X"), V("Y")}}, Atom{"vactive", {V("Y")}},
                         Atom{"r", {V("Y"), V("Z")}}, Atom{b, {V("Z")}},
                         Atom{"gactive", {V("Z")}}});
            }
    }

    // The initial condition: pos_<i> marks g-active nodes whose first counter
    // spells horizontal position i, vertical position 0, via one IDB per
    // (subtree, position) pair threading the fixed bit pattern leaf by leaf.
    void build_initial_rules() {
        const int n = input.n();
        const int leaves = 1 << m;
        for (int i = 0; i < n; ++i) {
            std::vector<int> pattern(leaves, 0);
            for (int bit = 0; bit < (1 << n); ++bit)
                pattern[bit] = (i >> bit) & 1;
            auto posb = [&](int level, int offset) {
                return "posb_" + std::to_string(i) + "_" + std::to_string(level) + "_" +
                       std::to_string(offset);
            };
            for (int j = 0; j < leaves; ++j) {
                gadget_vars = 0;
                std::vector<Atom> body = leaf_bit("X", 1, pattern[j]);
                body.push_back(Atom{"lrok", {V("X")}});
                add({Atom{posb(m, j), {V("X")}}}, std::move(body));
            }
            for (int level = m - 1; level >= 0; --level) {
                int span = 1 << (m - level);
                for (int offset = 0; offset < leaves; offset += span)
                    step_rule(posb(level, offset), posb(level + 1, offset),
                              posb(level + 1, offset + span / 2));
            }
            add({Atom{"pos_" + std::to_string(i), {V("X")}}},
                {Atom{posb(0, 0), {V("X")}}, Atom{"gactive", {V("X")}}});
        }
        for (int j = 0; j < n; ++j)
            for (const auto& t : problem.tiles)
                if (t != input.word[j])
                    add({Atom{"goal", {}}},
                        {Atom{"pos_" + std::to_string(j), {V("X")}}, Atom{t, {V("X")}}});
    }

    UnionQuery build_query() {
        auto zv = [](int i, int j, bool primed) {
            return std::string(primed ? "Zp" : "Z") + std::to_string(i) + "_" +
                   std::to_string(j);
        };
        std::vector<Atom> core{Atom{"r", {V("X0"), V("Y0")}}};
        for (int i = 1; i <= m; ++i) {
            std::string xi = "X" + std::to_string(i), xp = "X" + std::to_string(i - 1);
            std::string yi = "Y" + std::to_string(i), yp = "Y" + std::to_string(i - 1);
            core.push_back(Atom{"r", {V(xp), V(xi)}});
            core.push_back(Atom{"r", {V(yp), V(yi)}});
            core.push_back(Atom{"jump", {V(xi), V(zv(i, i + 2, false))}});
            core.push_back(Atom{"jump", {V(yi), V(zv(i, i + 3, true))}});
            for (int j = 0; j <= i + 1; ++j)
                core.push_back(Atom{"r", {V(zv(i, j, false)), V(zv(i, j + 1, false))}});
            core.push_back(Atom{"r", {V(zv(i, 0, false)), V(zv(i, 1, true))}});
            for (int j = 1; j <= i + 2; ++j)
                core.push_back(Atom{"r", {V(zv(i, j, true)), V(zv(i, j + 1, true))}});
        }
        std::string xm = "X" + std::to_string(m), ym = "Y" + std::to_string(m);

        UnionQuery q;
        if (mode == QueryMode::Ucq) {
            ConjunctiveQuery one;
            one.atoms = core;
            one.atoms.push_back(Atom{"B1", {V(xm)}});
            one.atoms.push_back(Atom{"B2bar", {V(ym)}});
            ConjunctiveQuery zero;
            zero.atoms = core;
            zero.atoms.push_back(Atom{"B1bar", {V(xm)}});
            zero.atoms.push_back(Atom{"B2", {V(ym)}});
            q.disjuncts = {one, zero};
            return q;
        }
        // Single CQ: anchored jump1/jump2 targets reachable from a common
        // source on r-paths of lengths m+2 and m+5.
        ConjunctiveQuery cq;
        cq.atoms = core;
        auto wv = [](int j, bool primed) {
            return std::string(primed ? "Wp" : "W") + std::to_string(j);
        };
        cq.atoms.push_back(Atom{"jump1", {V(xm), V(wv(m + 2, false))}});
        cq.atoms.push_back(Atom{"jump2", {V(ym), V(wv(m + 5, true))}});
        for (int j = 0; j <= m + 1; ++j)
            cq.atoms.push_back(Atom{"r", {V(wv(j, false)), V(wv(j + 1, false))}});
        cq.atoms.push_back(Atom{"r", {V(wv(0, false)), V(wv(1, true))}});
        for (int j = 1; j <= m + 4; ++j)
            cq.atoms.push_back(Atom{"r", {V(wv(j, true)), V(wv(j + 1, true))}});
        q.disjuncts = {cq};
        return q;
    }
};

const std::set<std::string>& reserved_tile_names() {
    static const std::set<std::string> names{
        "r",    "jump",    "jump1",   "jump2", "B1",   "B2",     "B1bar",
        "B2bar", "goal",   "left",    "right", "lrok", "gactive", "hactive",
        "vactive"};
    return names;
}

void validate_problem(const TilingProblem& problem, const TilingInput& input) {
    if (problem.tiles.empty()) throw Error("tiling problem has no tiles");
    for (const auto& t : problem.tiles) {
        if (t.empty() || !std::isalpha((unsigned char)t[0]))
            throw Error("tile name must be an identifier: " + t);
        if (reserved_tile_names().count(t) || t.rfind("lev", 0) == 0 ||
            t.rfind("pos", 0) == 0)
            throw Error("tile name collides with a generated relation: " + t);
    }
    for (const auto& t : input.word)
        if (!problem.has_tile(t)) throw Error("word tile not declared: " + t);
}

}  // namespace

LowerBound gen_lower_bound(const TilingProblem& problem, const TilingInput& input,
                           QueryMode mode) {
    validate_problem(problem, input);
    if (input.n() < 1) throw Error("gen_lower_bound: empty input word");
    if (input.n() > 2)
        throw LimitError("gen_lower_bound", "word length", input.n(), 2);

    Gen gen{problem, input, mode, input.m(), {}, 0};
    gen.p.goal = "goal";
    gen.p.arity = 0;
    if (mode == QueryMode::Ucq) {
        for (const char* rel : {"B1", "B2", "B1bar", "B2bar"})
            gen.p.schema.declare(rel, 1);
    } else {
        gen.p.schema.declare("jump1", 2);
        gen.p.schema.declare("jump2", 2);
    }
    gen.p.schema.declare("r", 2);
    gen.p.schema.declare("jump", 2);
    gen.p.schema.declare("goal", 0);

    gen.build_tree_rules();
    gen.build_tiling_rules();
    gen.build_initial_rules();

    LowerBound out;
    out.query = gen.build_query();
    out.program = std::move(gen.p);
    return out;
}

namespace {

struct GridBuilder {
    QueryMode mode;
    Instance inst;

    void edge(const std::string& a, const std::string& b) {
        inst.add_fact(Atom{"r", {Term::cst(a), Term::cst(b)}});
    }
    void jump_edge(const std::string& rel, const std::string& a, const std::string& b) {
        inst.add_fact(Atom{rel, {Term::cst(a), Term::cst(b)}});
    }

    void left_gadget(const std::string& v) {
        edge(v, v + "ga");
        edge(v + "ga", v + "gb");
        jump_edge("jump", v, v + "gb");
    }
    void right_gadget(const std::string& v) {
        edge(v, v + "ga");
        jump_edge("jump", v, v + "ga");
    }

    void leaf_labels(const std::string& leaf, int b1, int b2) {
        if (mode == QueryMode::Ucq) {
            inst.add_fact(Atom{b1 ? "B1" : "B1bar", {Term::cst(leaf)}});
            inst.add_fact(Atom{b2 ? "B2" : "B2bar", {Term::cst(leaf)}});
            return;
        }
        // One shared r-path of length four; jump1/jump2 mark the bit values.
        std::vector<std::string> path;
        for (int i = 1; i <= 4; ++i) path.push_back(leaf + "p" + std::to_string(i));
        edge(leaf, path[0]);
        for (int i = 0; i < 3; ++i) edge(path[i], path[i + 1]);
        auto mark = [&](const std::string& rel, int bit) {
            if (bit) {
                jump_edge(rel, leaf, path[0]);
                jump_edge(rel, leaf, path[3]);
            } else {
                jump_edge(rel, leaf, path[1]);
                jump_edge(rel, leaf, path[2]);
            }
        };
        mark("jump1", b1);
        mark("jump2", b2);
    }

    // Depth-2 counting tree with the two 4-bit counter values at the leaves.
    void tree(const std::string& root, const std::vector<int>& v1,
              const std::vector<int>& v2) {
        std::string n0 = root + "a", n1 = root + "b";
        edge(root, n0);
        edge(root, n1);
        left_gadget(n0);
        right_gadget(n1);
        const std::string leaves[4] = {n0 + "a", n0 + "b", n1 + "a", n1 + "b"};
        edge(n0, leaves[0]);
        edge(n0, leaves[1]);
        edge(n1, leaves[2]);
        edge(n1, leaves[3]);
        left_gadget(leaves[0]);
        right_gadget(leaves[1]);
        left_gadget(leaves[2]);
        right_gadget(leaves[3]);
        for (int j = 0; j < 4; ++j) leaf_labels(leaves[j], v1[j], v2[j]);
    }
};

std::vector<int> position_bits(int x, int y) {
    return {x & 1, (x >> 1) & 1, y & 1, (y >> 1) & 1};
}

std::string grid_node(int x, int y) {
    return "g" + std::to_string(x) + std::to_string(y);
}

}  // namespace

Instance gen_canonical_grid(const TilingProblem& problem, const TilingInput& input,
                            QueryMode mode) {
    validate_problem(problem, input);
    if (input.n() != 1) throw Error("gen_canonical_grid: only n = 1 is in range");

    GridBuilder b{mode, {}};
    b.inst.schema.declare("r", 2);
    b.inst.schema.declare("jump", 2);
    if (mode == QueryMode::Ucq) {
        for (const char* rel : {"B1", "B2", "B1bar", "B2bar"})
            b.inst.schema.declare(rel, 1);
    } else {
        b.inst.schema.declare("jump1", 2);
        b.inst.schema.declare("jump2", 2);
    }

    const int width = 4;  // 2^(2^1)
    for (int x = 0; x < width; ++x)
        for (int y = 0; y < width; ++y) {
            std::string g = grid_node(x, y);
            auto bits = position_bits(x, y);
            b.tree(g, bits, bits);
            if (mode == QueryMode::Ucq) {
                std::string c = g + "s";
                b.edge(g, c);
                b.edge(c, g);
                b.tree(c, bits, bits);
            } else {
                std::string prev = g;
                for (int i = 1; i <= 3; ++i) {
                    std::string c = g + "s" + std::to_string(i);
                    b.edge(prev, c);
                    b.tree(c, bits, bits);
                    prev = c;
                }
                b.edge(prev, g);
            }
            if (x + 1 < width) {
                std::string h = "h" + std::to_string(x) + std::to_string(y);
                b.edge(g, h);
                b.edge(h, grid_node(x + 1, y));
                b.tree(h, position_bits(x + 1, y), bits);
            }
            if (y + 1 < width) {
                std::string v = "v" + std::to_string(x) + std::to_string(y);
                b.edge(g, v);
                b.edge(v, grid_node(x, y + 1));
                b.tree(v, position_bits(x, y + 1), bits);
            }
        }
    return b.inst;
}

Program query_as_program(const UnionQuery& q) {
    Program p;
    p.goal = "query$goal";
    for (const auto& cq : q.disjuncts) {
        Rule r;
        Atom head{"query$goal", {}};
        for (const auto& v : cq.answer_vars) head.args.push_back(Term::var(v));
        r.head = {std::move(head)};
        r.body = cq.atoms;
        p.add_rule(std::move(r));
        p.arity = (int)cq.answer_vars.size();
    }
    if (!p.schema.contains("query$goal")) p.schema.declare("query$goal", 0);
    return p;
}

UnionQuery program_as_query(const Program& p) {
    UnionQuery q;
    for (const auto& r : p.rules) {
        if (r.head.size() != 1 || r.head.front().relation != p.goal)
            throw Error("program_as_query: not a goal-rules-only program");
        ConjunctiveQuery cq;
        for (const auto& t : r.head.front().args) {
            if (!t.is_var()) throw Error("program_as_query: constant answer term");
            cq.answer_vars.push_back(t.name);
        }
        cq.atoms = r.body;
        q.disjuncts.push_back(std::move(cq));
    }
    return q;
}

}  // namespace mdc
