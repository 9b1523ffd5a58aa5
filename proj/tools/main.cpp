#include "CLI11.hpp"
#include "json.hpp"

#include "mdc/driver.hpp"
#include "mdc/textio.hpp"
#include "mdc/tilegen.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

using namespace mdc;
using nlohmann::json;

namespace {

constexpr int kExitContained = 0;
constexpr int kExitNotContained = 1;
constexpr int kExitError = 2;

std::uint64_t now_ms() {
    return (std::uint64_t)std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

json record_skeleton(const std::string& command) {
    return json{{"command", command},
                {"verdict", nullptr},
                {"evidence", json::object()},
                {"timing_ms", nullptr},
                {"stages", json::object()}};
}

json stats_json(const StageStats& s) {
    return json{{"branches", s.branches},
                {"simplified_rules_left", s.simplified_rules_left},
                {"simplified_rules_right", s.simplified_rules_right},
                {"ground_clauses", s.reduced_rules},
                {"disjointness_rules", s.disjointness_rules},
                {"zero_types", s.zero_types}};
}

Girth parse_girth(const std::string& text) {
    if (text == "inf" || text == "infinity") return std::nullopt;
    return std::stoi(text);
}

int run_check(const std::string& left, const std::string& right, bool mmsnp,
              bool as_json, const std::string& evidence_dir,
              std::uint64_t max_ground_clauses, std::uint64_t max_elements) {
    ContainOptions opts;
    opts.eval.max_ground_clauses = max_ground_clauses;
    opts.max_elements = max_elements;

    std::uint64_t start = now_ms();
    Decision d;
    if (mmsnp) {
        MMSNPSentence phi1 = parse_mmsnp(read_file(left));
        MMSNPSentence phi2 = parse_mmsnp(read_file(right));
        d = contain_mmsnp(phi1, phi2, opts);
    } else {
        Program p1 = parse_program(read_file(left));
        Program p2 = parse_program(read_file(right));
        d = contain(p1, p2, opts);
    }
    std::uint64_t elapsed = now_ms() - start;

    json evidence = json::object();
    if (!d.contained) {
        if (d.branch) evidence["branch"] = d.branch->constants;
        if (d.witness_theta)
            evidence["theta"] = std::vector<std::string>(
                d.witness_theta->relations.begin(), d.witness_theta->relations.end());
        std::vector<std::string> files;
        if (!evidence_dir.empty()) {
            std::filesystem::create_directories(evidence_dir);
            if (d.witness_theta) {
                Instance theta_facts;
                for (const auto& rel : d.witness_theta->relations)
                    theta_facts.add_fact(Atom{rel, {}});
                std::string path = evidence_dir + "/theta.facts";
                write_file(path, render_instance(theta_facts));
                files.push_back(path);
            }
            if (d.witness_k_theta) {
                std::string path = evidence_dir + "/k_theta.facts";
                write_file(path, render_instance(*d.witness_k_theta));
                files.push_back(path);
            }
        }
        evidence["files"] = files;
    }

    if (as_json) {
        json rec = record_skeleton(mmsnp ? "check --mmsnp" : "check");
        rec["verdict"] = d.contained ? "CONTAINED" : "NOT_CONTAINED";
        rec["evidence"] = evidence;
        rec["timing_ms"] = elapsed;
        rec["stages"] = stats_json(d.stats);
        std::cout << rec.dump(2) << "\n";
    } else {
        std::cout << (d.contained ? "CONTAINED" : "NOT_CONTAINED") << "\n";
    }
    return d.contained ? kExitContained : kExitNotContained;
}

int run_eval(const std::string& program_path, const std::string& instance_path,
             std::uint64_t max_ground_clauses) {
    Program p = parse_program(read_file(program_path));
    Instance i = parse_instance(read_file(instance_path));
    EvalOptions opts;
    opts.max_ground_clauses = max_ground_clauses;
    for (const auto& t : ddlog_answers(p, i, opts)) {
        std::cout << "(";
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (k) std::cout << ",";
            std::cout << t[k];
        }
        std::cout << ")\n";
    }
    return kExitContained;
}

int run_brute(const std::string& left, const std::string& right, int max_size,
              const std::string& min_girth, bool as_json,
              std::uint64_t max_ground_clauses) {
    Program p1 = parse_program(read_file(left));
    Program p2 = parse_program(read_file(right));
    BruteOptions opts;
    opts.eval.max_ground_clauses = max_ground_clauses;
    std::uint64_t start = now_ms();
    OracleResult r = brute_contains(p1, p2, max_size, parse_girth(min_girth), opts);
    std::uint64_t elapsed = now_ms() - start;

    if (as_json) {
        json rec = record_skeleton("brute");
        rec["verdict"] = r.found() ? "NOT_CONTAINED" : "CONTAINED";
        json evidence = json::object();
        if (r.found()) {
            evidence["tuple"] = *r.tuple;
            evidence["instance"] = render_instance(*r.counterexample);
        }
        rec["evidence"] = evidence;
        rec["timing_ms"] = elapsed;
        std::cout << rec.dump(2) << "\n";
    } else if (r.found()) {
        std::cout << "COUNTEREXAMPLE\n";
        std::cout << "tuple: (";
        for (std::size_t k = 0; k < r.tuple->size(); ++k) {
            if (k) std::cout << ",";
            std::cout << (*r.tuple)[k];
        }
        std::cout << ")\n";
        std::cout << render_instance(*r.counterexample);
    } else {
        std::cout << "NO_COUNTEREXAMPLE up to " << r.max_domain << " constants\n";
    }
    return r.found() ? kExitNotContained : kExitContained;
}

int run_translate(const std::string& to, const std::string& in_path,
                  const std::string& out_path) {
    std::string out_text;
    if (to == "mddlog") {
        MMSNPSentence phi = parse_mmsnp(read_file(in_path));
        out_text = render_program(mmsnp_to_mddlog(phi));
    } else if (to == "mmsnp") {
        Program p = parse_program(read_file(in_path));
        out_text = render_mmsnp(mddlog_to_mmsnp(p));
    } else {
        throw Error("unknown translation target: " + to);
    }
    if (out_path.empty())
        std::cout << out_text;
    else
        write_file(out_path, out_text);
    return kExitContained;
}

int run_gen_tiling(const std::string& problem_path, const std::string& mode_text,
                   const std::string& out_dir) {
    auto [problem, input] = parse_tiling(read_file(problem_path));
    if (mode_text != "cq" && mode_text != "ucq")
        throw Error("mode must be ucq or cq");
    QueryMode mode = mode_text == "cq" ? QueryMode::Cq : QueryMode::Ucq;
    LowerBound lb = gen_lower_bound(problem, input, mode);
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/program.mddlog", render_program(lb.program));
    write_file(out_dir + "/query.mddlog", render_program(query_as_program(lb.query)));
    std::cout << out_dir << "/program.mddlog\n" << out_dir << "/query.mddlog\n";
    if (input.n() == 1) {
        Instance grid = gen_canonical_grid(problem, input, mode);
        write_file(out_dir + "/grid.facts", render_instance(grid));
        std::cout << out_dir << "/grid.facts\n";
    }
    return kExitContained;
}

int run_simplify(const std::string& left, const std::string& right,
                 const std::string& out_dir) {
    Program p1 = parse_program(read_file(left));
    Program p2 = parse_program(read_file(right));
    auto [a1, a2] = align_pair(p1, p2);
    SimplifyResult s = simplify_pair(a1, a2);
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/left_simple.mddlog", render_program(s.left));
    write_file(out_dir + "/right_simple.mddlog", render_program(s.right));
    // The consolidated relations, each defined by the conjunction it stands
    // for.
    Program defs;
    for (const auto& [key, e] : s.map.entries) {
        Rule r;
        Atom head{e.relation, {}};
        for (const auto& v : e.vars) head.args.push_back(Term::var(v));
        r.head = {head};
        r.body = e.cq;
        defs.add_rule(std::move(r));
    }
    write_file(out_dir + "/consolidation.mddlog", render_program(defs));
    std::cout << out_dir << "/left_simple.mddlog\n"
              << out_dir << "/right_simple.mddlog\n"
              << out_dir << "/consolidation.mddlog\n";
    return kExitContained;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Containment for monadic disjunctive Datalog and MMSNP"};
    app.require_subcommand(1);

    std::string left, right, program_path, instance_path, in_path, out_path;
    std::string to, mode = "ucq", out_dir, evidence_dir, min_girth = "0";
    std::string problem_path;
    bool mmsnp = false, as_json = false;
    int max_size = 2;
    std::uint64_t max_ground_clauses = 10'000'000;
    std::uint64_t max_elements = 16384;

    auto* check = app.add_subcommand("check", "Decide containment of two programs");
    check->add_option("--left", left)->required();
    check->add_option("--right", right)->required();
    check->add_flag("--mmsnp", mmsnp, "Inputs are MMSNP sentences");
    check->add_flag("--json", as_json, "Emit a JSON verdict record");
    check->add_option("--evidence-dir", evidence_dir,
                      "Write witness files here on non-containment");
    check->add_option("--max-ground-clauses", max_ground_clauses);
    check->add_option("--max-elements", max_elements,
                      "Guard on test-instance elements");

    auto* eval_cmd = app.add_subcommand("eval", "Certain answers of a program");
    eval_cmd->add_option("--program", program_path)->required();
    eval_cmd->add_option("--instance", instance_path)->required();
    eval_cmd->add_option("--max-ground-clauses", max_ground_clauses);

    auto* brute = app.add_subcommand("brute", "Brute-force counterexample search");
    brute->add_option("--left", left)->required();
    brute->add_option("--right", right)->required();
    brute->add_option("--max-size", max_size)->required();
    brute->add_option("--min-girth", min_girth,
                      "Keep instances of girth exceeding this (or 'inf')");
    brute->add_flag("--json", as_json);
    brute->add_option("--max-ground-clauses", max_ground_clauses);

    auto* translate = app.add_subcommand("translate", "MMSNP <-> MDDLog translation");
    translate->add_option("--to", to)->required();
    translate->add_option("--in", in_path)->required();
    translate->add_option("--out", out_path);

    auto* gen = app.add_subcommand("gen-tiling", "Generate the tiling lower bound");
    gen->add_option("--problem", problem_path)->required();
    gen->add_option("--mode", mode, "ucq or cq");
    gen->add_option("--out", out_dir)->required();

    auto* simp = app.add_subcommand("simplify", "Jointly simplify a program pair");
    simp->add_option("--left", left)->required();
    simp->add_option("--right", right)->required();
    simp->add_option("--out", out_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed())
            return run_check(left, right, mmsnp, as_json, evidence_dir,
                             max_ground_clauses, max_elements);
        if (eval_cmd->parsed())
            return run_eval(program_path, instance_path, max_ground_clauses);
        if (brute->parsed())
            return run_brute(left, right, max_size, min_girth, as_json,
                             max_ground_clauses);
        if (translate->parsed()) return run_translate(to, in_path, out_path);
        if (gen->parsed()) return run_gen_tiling(problem_path, mode, out_dir);
        if (simp->parsed()) return run_simplify(left, right, out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
