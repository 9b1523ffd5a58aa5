#include "mdc/textio.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace mdc {

namespace {

enum class Tok {
    Ident,
    LParen,
    RParen,
    Comma,
    Dot,
    Turnstile,  // :-
    Pipe,
    Semi,
    Arrow,  // ->
    Amp,
    Colon,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }
    Token expect(Tok kind, const std::string& what) {
        if (tok_.kind != kind)
            throw ParseError("expected " + what + ", found '" + describe(tok_) + "'",
                             tok_.span);
        return take();
    }

    static std::string describe(const Token& t) {
        return t.kind == Tok::End ? "end of input" : t.text;
    }

private:
    void advance() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace((unsigned char)c)) {
                ++col_;
                ++pos_;
            } else {
                break;
            }
        }
        tok_.span = {line_, col_};
        if (pos_ >= text_.size()) {
            tok_.kind = Tok::End;
            tok_.text.clear();
            return;
        }
        char c = text_[pos_];
        auto single = [&](Tok k) {
            tok_.kind = k;
            tok_.text = std::string(1, c);
            ++pos_;
            ++col_;
        };
        if (std::isalpha((unsigned char)c) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_' ||
                    text_[pos_] == '$'))
                ++pos_;
            tok_.kind = Tok::Ident;
            tok_.text = text_.substr(start, pos_ - start);
            col_ += (int)tok_.text.size();
            return;
        }
        switch (c) {
            case '(': single(Tok::LParen); return;
            case ')': single(Tok::RParen); return;
            case ',': single(Tok::Comma); return;
            case '.': single(Tok::Dot); return;
            case '|': single(Tok::Pipe); return;
            case ';': single(Tok::Semi); return;
            case '&': single(Tok::Amp); return;
            case ':':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
                    tok_.kind = Tok::Turnstile;
                    tok_.text = ":-";
                    pos_ += 2;
                    col_ += 2;
                } else {
                    single(Tok::Colon);
                }
                return;
            case '-':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                    tok_.kind = Tok::Arrow;
                    tok_.text = "->";
                    pos_ += 2;
                    col_ += 2;
                    return;
                }
                throw ParseError("stray '-'", tok_.span);
            default:
                throw ParseError(std::string("unexpected character '") + c + "'",
                                 tok_.span);
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

Term make_term(const Token& t) {
    if (std::isupper((unsigned char)t.text[0])) return Term::var(t.text);
    return Term::cst(t.text);
}

Atom parse_atom(Lexer& lx, Schema& schema) {
    Token rel = lx.expect(Tok::Ident, "relation name");
    lx.expect(Tok::LParen, "'('");
    Atom a{rel.text, {}};
    if (lx.peek().kind != Tok::RParen) {
        while (true) {
            Token arg = lx.expect(Tok::Ident, "term");
            a.args.push_back(make_term(arg));
            if (lx.peek().kind == Tok::Comma) {
                lx.take();
                continue;
            }
            break;
        }
    }
    lx.expect(Tok::RParen, "')'");
    auto it = schema.relations.find(a.relation);
    if (it == schema.relations.end())
        schema.declare(a.relation, (int)a.args.size());
    else if (it->second != (int)a.args.size())
        throw ParseError("relation " + a.relation + " used with arity " +
                             std::to_string(a.args.size()) + " but first seen with " +
                             std::to_string(it->second),
                         rel.span);
    return a;
}

}  // namespace

Program parse_program(const std::string& text) {
    Lexer lx(text);
    Program p;
    std::optional<int> goal_arity;
    bool saw_goal = false, saw_query_goal = false;
    while (lx.peek().kind != Tok::End) {
        SourceSpan rule_span = lx.peek().span;
        Rule r;
        if (lx.peek().kind == Tok::Ident && lx.peek().text == "false") {
            lx.take();
        } else {
            while (true) {
                r.head.push_back(parse_atom(lx, p.schema));
                if (lx.peek().kind == Tok::Pipe) {
                    lx.take();
                    continue;
                }
                break;
            }
        }
        lx.expect(Tok::Turnstile, "':-'");
        while (true) {
            r.body.push_back(parse_atom(lx, p.schema));
            if (lx.peek().kind == Tok::Comma) {
                lx.take();
                continue;
            }
            break;
        }
        lx.expect(Tok::Dot, "'.'");

        std::set<std::string> body_vars;
        for (const auto& a : r.body) {
            if (a.relation == "goal" || a.relation == "query$goal")
                throw ParseError("goal relation " + a.relation + " occurs in a rule body",
                                 rule_span);
            for (const auto& t : a.args)
                if (t.is_var()) body_vars.insert(t.name);
        }
        for (const auto& a : r.head) {
            if (a.relation == "goal") saw_goal = true;
            if (a.relation == "query$goal") saw_query_goal = true;
            if ((a.relation == "goal" || a.relation == "query$goal") && r.head.size() > 1)
                throw ParseError("goal relation in a disjunctive head", rule_span);
            for (const auto& t : a.args)
                if (t.is_var() && !body_vars.count(t.name))
                    throw ParseError("head variable " + t.name + " missing from the body",
                                     rule_span);
        }
        p.rules.push_back(std::move(r));
    }
    p.goal = saw_goal || !saw_query_goal ? "goal" : "query$goal";
    for (const auto& r : p.rules)
        for (const auto& a : r.head)
            if (a.relation == p.goal) {
                if (goal_arity && *goal_arity != (int)a.args.size())
                    throw ParseError("goal rules disagree on arity", {1, 1});
                goal_arity = (int)a.args.size();
            }
    p.arity = goal_arity.value_or(0);
    if (!p.schema.contains(p.goal)) p.schema.declare(p.goal, p.arity);
    return p;
}

namespace {

std::string render_term(const Term& t) { return t.name; }

std::string render_atom(const Atom& a) {
    std::string s = a.relation;
    s += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ',';
        s += render_term(a.args[i]);
    }
    s += ')';
    return s;
}

}  // namespace

std::string render_program(const Program& p) {
    std::string out;
    for (const auto& r : p.rules) {
        if (r.head.empty()) {
            out += "false";
        } else {
            for (std::size_t i = 0; i < r.head.size(); ++i) {
                if (i) out += " | ";
                out += render_atom(r.head[i]);
            }
        }
        out += " :- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i) out += ", ";
            out += render_atom(r.body[i]);
        }
        out += ".\n";
    }
    return out;
}

Instance parse_instance(const std::string& text) {
    Lexer lx(text);
    Instance inst;
    while (lx.peek().kind != Tok::End) {
        SourceSpan span = lx.peek().span;
        Atom a = parse_atom(lx, inst.schema);
        lx.expect(Tok::Dot, "'.'");
        for (const auto& t : a.args)
            if (t.is_var())
                throw ParseError("variable " + t.name + " in a fact", span);
        inst.facts.insert(std::move(a));
    }
    return inst;
}

std::string render_instance(const Instance& instance) {
    std::string out;
    for (const auto& f : instance.facts) {
        out += render_atom(f);
        out += ".\n";
    }
    return out;
}

MMSNPSentence parse_mmsnp(const std::string& text) {
    Lexer lx(text);
    MMSNPSentence phi;
    Token kw = lx.expect(Tok::Ident, "'exists'");
    if (kw.text != "exists") throw ParseError("expected 'exists'", kw.span);
    while (lx.peek().kind == Tok::Ident && lx.peek().text != "forall")
        phi.so_vars.push_back(lx.take().text);
    lx.expect(Tok::Dot, "'.'");
    kw = lx.expect(Tok::Ident, "'forall'");
    if (kw.text != "forall") throw ParseError("expected 'forall'", kw.span);
    while (lx.peek().kind == Tok::Ident) phi.fo_vars.push_back(lx.take().text);
    lx.expect(Tok::Dot, "'.'");

    std::set<std::string> so(phi.so_vars.begin(), phi.so_vars.end());
    std::set<std::string> fo(phi.fo_vars.begin(), phi.fo_vars.end());
    for (const auto& v : phi.so_vars)
        if (fo.count(v))
            throw ParseError("name " + v + " declared both SO and FO", {1, 1});

    auto parse_clause_atom = [&](bool beta) {
        SourceSpan span = lx.peek().span;
        Schema scratch;
        Atom a = parse_atom(lx, scratch);
        for (auto& t : a.args) {
            if (!fo.count(t.name))
                throw ParseError("undeclared variable " + t.name, span);
            t = Term::var(t.name);
        }
        if (so.count(a.relation)) {
            if (a.args.size() != 1)
                throw ParseError("SO variable " + a.relation + " must be unary", span);
        } else {
            if (beta)
                throw ParseError("EDB relation " + a.relation +
                                     " on the right of an implication",
                                 span);
            phi.edb_schema.declare(a.relation, (int)a.args.size());
        }
        return a;
    };

    while (lx.peek().kind != Tok::End) {
        MMSNPClause clause;
        if (lx.peek().kind == Tok::Ident && lx.peek().text == "true") {
            lx.take();
        } else {
            while (true) {
                clause.alphas.push_back(parse_clause_atom(false));
                if (lx.peek().kind == Tok::Amp) {
                    lx.take();
                    continue;
                }
                break;
            }
        }
        lx.expect(Tok::Arrow, "'->'");
        if (lx.peek().kind == Tok::Ident && lx.peek().text == "false") {
            lx.take();
        } else {
            while (true) {
                clause.betas.push_back(parse_clause_atom(true));
                if (lx.peek().kind == Tok::Pipe) {
                    lx.take();
                    continue;
                }
                break;
            }
        }
        phi.clauses.push_back(std::move(clause));
        if (lx.peek().kind == Tok::Semi) {
            lx.take();
            continue;
        }
        break;
    }
    if (lx.peek().kind != Tok::End)
        throw ParseError("trailing input after sentence", lx.peek().span);
    return phi;
}

std::string render_mmsnp(const MMSNPSentence& phi) {
    std::string out = "exists";
    for (const auto& v : phi.so_vars) out += " " + v;
    out += " . forall";
    for (const auto& v : phi.fo_vars) out += " " + v;
    out += " .\n";
    for (std::size_t i = 0; i < phi.clauses.size(); ++i) {
        const auto& c = phi.clauses[i];
        out += "  ";
        if (c.alphas.empty()) {
            out += "true";
        } else {
            for (std::size_t j = 0; j < c.alphas.size(); ++j) {
                if (j) out += " & ";
                out += render_atom(c.alphas[j]);
            }
        }
        out += " -> ";
        if (c.betas.empty()) {
            out += "false";
        } else {
            for (std::size_t j = 0; j < c.betas.size(); ++j) {
                if (j) out += " | ";
                out += render_atom(c.betas[j]);
            }
        }
        out += i + 1 < phi.clauses.size() ? " ;\n" : "\n";
    }
    return out;
}

std::pair<TilingProblem, TilingInput> parse_tiling(const std::string& text) {
    TilingProblem problem;
    TilingInput input;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool saw_tiles = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto cut = line.find('%'); cut != std::string::npos) line.resize(cut);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        auto rest = [&]() {
            std::vector<std::string> out;
            std::string w;
            while (ls >> w) out.push_back(w);
            return out;
        };
        SourceSpan span{lineno, 1};
        if (head == "tiles:") {
            problem.tiles = rest();
            if (problem.tiles.empty()) throw ParseError("empty tile set", span);
            saw_tiles = true;
        } else if (head == "h:" || head == "v:") {
            auto ts = rest();
            if (ts.size() != 2) throw ParseError("expected two tiles", span);
            for (const auto& t : ts)
                if (!problem.has_tile(t)) throw ParseError("undeclared tile " + t, span);
            auto& set = head == "h:" ? problem.horizontal : problem.vertical;
            set.insert({ts[0], ts[1]});
        } else if (head == "word:") {
            input.word = rest();
            for (const auto& t : input.word)
                if (!problem.has_tile(t)) throw ParseError("undeclared tile " + t, span);
        } else {
            throw ParseError("unknown line head '" + head + "'", span);
        }
    }
    if (!saw_tiles) throw ParseError("missing tiles: line", {1, 1});
    if (input.word.empty()) throw ParseError("missing word: line", {1, 1});
    return {problem, input};
}

std::string render_tiling(const TilingProblem& problem, const TilingInput& input) {
    std::string out = "tiles:";
    for (const auto& t : problem.tiles) out += " " + t;
    out += "\n";
    for (const auto& [a, b] : problem.horizontal) out += "h: " + a + " " + b + "\n";
    for (const auto& [a, b] : problem.vertical) out += "v: " + a + " " + b + "\n";
    out += "word:";
    for (const auto& t : input.word) out += " " + t;
    out += "\n";
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace mdc
