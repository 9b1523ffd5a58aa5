// Compares the serial reference paths with the OpenMP kernels and reports the
// work growth of the emptiness check as the program scales.

#include "mdc/driver.hpp"
#include "mdc/emptiness.hpp"
#include "mdc/textio.hpp"

#include <chrono>
#include <iostream>

using namespace mdc;

namespace {

double ms(std::chrono::steady_clock::time_point a,
          std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

template <typename Fn>
double timed(Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return ms(t0, t1);
}

// A semi-simple family with two disjoint unary relations and n goal rules.
std::pair<Program, DisjointnessSet> scaled_system(int n) {
    Program p;
    p.schema.declare("P", 1);
    p.schema.declare("Q", 1);
    p.schema.declare("r", 2);
    p.schema.declare("goal", 0);
    for (int i = 0; i < n; ++i) {
        p.schema.declare("I" + std::to_string(i), 1);
        Rule derive;
        derive.head = {Atom{"I" + std::to_string(i), {Term::var("X")}}};
        derive.body = {Atom{"r", {Term::var("X"), Term::var("Y")}},
                       Atom{"P", {Term::var(i % 2 ? "X" : "Y")}}};
        p.add_rule(std::move(derive));
        Rule fire;
        fire.head = {Atom{"goal", {}}};
        fire.body = {Atom{"r", {Term::var("X"), Term::var("Y")}},
                     Atom{"I" + std::to_string(i), {Term::var("X")}},
                     Atom{"Q", {Term::var("Y")}}};
        p.add_rule(std::move(fire));
    }
    DisjointnessSet d;
    Rule excl;
    excl.body = {Atom{"P", {Term::var("X")}}, Atom{"Q", {Term::var("X")}}};
    d.rules.push_back(std::move(excl));
    return {p, d};
}

}  // namespace

int main() {
    Program left = parse_program(
        "A1(X) | A2(X) :- A(X).\n"
        "goal(X) :- A1(X), r(X,Y), A1(Y).\n"
        "goal(X) :- A2(X), r(X,Y), A2(Y).\n");
    Program right = parse_program("goal(X) :- B(X).\n");

    std::cout << "brute-force sweep (running example pair)\n";
    for (int max_size : {2, 3}) {
        OracleResult a, b;
        double serial = timed([&] { a = brute_contains_serial(left, right, max_size, Girth{}); });
        double parallel = timed([&] { b = brute_contains(left, right, max_size, Girth{}); });
        std::cout << "  max-size " << max_size << ", girth inf: serial " << serial
                  << " ms, parallel " << parallel << " ms, agree "
                  << (a.found() == b.found()) << "\n";
    }

    std::cout << "emptiness check (scaling rule count at fixed constraints)\n";
    for (int n : {2, 4, 8, 16}) {
        auto [p, d] = scaled_system(n);
        EmptinessResult a, b;
        double serial = timed([&] { a = check_empty_serial(p, d); });
        double parallel = timed([&] { b = check_empty(p, d); });
        std::cout << "  rules " << p.rules.size() << ": serial " << serial
                  << " ms, parallel " << parallel << " ms, agree "
                  << (a.empty == b.empty) << "\n";
    }
    return 0;
}
