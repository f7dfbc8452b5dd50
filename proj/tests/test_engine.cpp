#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mdtw/engine.hpp"
#include "mdtw/error.hpp"
#include "mdtw/solvers.hpp"
#include "mdtw/tautd.hpp"
#include "test_support.hpp"

using namespace mdtw;
namespace t = mdtw::testing;

namespace {

TauStructure facts(const std::string& text) {
    const auto p = parse_program(text);
    TauStructure a;
    for (const auto& r : p.rules) {
        const auto pred = a.add_predicate(p.predicates[r.head.pred].name, p.predicates[r.head.pred].arity);
        std::vector<ElemId> args;
        for (const auto& term : r.head.args) args.push_back(a.add_element(p.constants[term.id]));
        a.add_fact(pred, args);
    }
    return a;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
}

TauTdStructure example41() {
    const auto a = schema_to_structure(t::example21());
    return encode(a, normalize_def21(t::fig1(), a));
}

}  // namespace

TEST(Parse, Basics) {
    const auto p = parse_program("p(X) :- bag(V,X,Y,Z), leaf(V).\n");
    ASSERT_EQ(p.rules.size(), 1u);
    EXPECT_TRUE(p.predicates[*p.find_predicate("p")].intensional);
    EXPECT_FALSE(p.predicates[*p.find_predicate("bag")].intensional);
    EXPECT_TRUE(p.monadic_lint().empty());
}

TEST(Parse, Errors) {
    EXPECT_THROW(parse_program("q(X) :- e(X).\np(X) :- e(X), not q(X).\n"), ParseError);
    EXPECT_THROW(parse_program("p(X) :- not e(X).\n"), ParseError);
    EXPECT_THROW(parse_program("p(X) :- e(X)\n"), ParseError);
    try {
        parse_program("% c\np(X) :- e(X Y).\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_GT(e.column(), 0);
    }
}

TEST(Parse, ZeroAryAndFdDecl) {
    const auto p = parse_program("@fd e: 1 -> 2.\nsuccess :- root(S), solve(S).\nsolve(S) :- leaf(S), e(S,T).\n");
    EXPECT_EQ(p.predicates[*p.find_predicate("success")].arity, 0);
    ASSERT_EQ(p.fds.size(), 1u);
    EXPECT_EQ(p.fds[0].from, (std::vector<int>{0}));
    EXPECT_EQ(p.fds[0].to, (std::vector<int>{1}));
    EXPECT_EQ(parse_program("p(X,Y) :- e(X,Y).").monadic_lint(), (std::vector<std::string>{"p"}));
}

TEST(Guards, BranchRule) {
    const auto p = parse_program(
        "s(V) :- bag(V,X,Y,Z), child1(V1,V), child2(V2,V), s(V1), s(V2).\n");
    EXPECT_EQ(infer_guards(p), (std::vector<int>{0}));
}

TEST(Guards, NotQuasiGuarded) {
    const auto p = parse_program("p(X) :- e(X,Y), e(Y,Z).\n");
    try {
        infer_guards(p);
        FAIL();
    } catch (const NotQuasiGuarded& e) {
        EXPECT_EQ(e.rule(), 0u);
        EXPECT_FALSE(e.unreachable().empty());
    }
    const auto ok = parse_program("@fd e: 1 -> 2.\np(X) :- e(X,Y), e(Y,Z).\n");
    EXPECT_NO_THROW(infer_guards(ok));
}

TEST(Guards, SingleAtom) {
    const auto p = parse_program("p(X) :- q(X), e(X,Y,Z), r(Y).\n");
    EXPECT_EQ(infer_guards(p), (std::vector<int>{1}));
}

TEST(Ground, BagGuarded) {
    const auto enc = example41();
    const auto p = parse_program("p(V) :- bag(V,X,Y,Z), not att(X).\n");
    const auto g = ground(p, enc.structure);
    EXPECT_LE(g.rules.size(), 22u);
    EXPECT_EQ(g.guard_facts[0], 22u);
    EXPECT_LE(g.per_rule[0], g.guard_facts[0]);
}

TEST(Ground, EmptyAndContradicted) {
    const auto enc = example41();
    EXPECT_TRUE(ground(DatalogProgram{}, enc.structure).rules.empty());
    const auto p = parse_program("p(V) :- bag(V,X,Y,Z), not bag(V,X,Y,Z).\n");
    EXPECT_TRUE(ground(p, enc.structure).rules.empty());
}

TEST(Eval, Chain) {
    const auto m = evaluate(parse_program("a.\nb :- a.\nc :- b.\n"), TauStructure{});
    EXPECT_TRUE(m.contains("a"));
    EXPECT_TRUE(m.contains("b"));
    EXPECT_TRUE(m.contains("c"));
}

TEST(Eval, EdbOnlyAndUnderivable) {
    const auto edb = facts("e(x,y).\n");
    const auto m = evaluate(DatalogProgram{}, edb);
    EXPECT_TRUE(m.contains("e", {"x", "y"}));
    EXPECT_TRUE(m.derived_facts().empty());
    const auto m2 = evaluate(parse_program("p :- q.\nq :- q.\n"), edb);
    EXPECT_FALSE(m2.contains("p"));
    EXPECT_TRUE(m2.contains("e", {"x", "y"}));
}

TEST(Eval, DecrementsLinear) {
    std::mt19937_64 rng(17);
    const auto prog = parse_program(three_col_program(2));
    for (int i = 0; i < 10; ++i) {
        const auto g = t::random_graph(rng, 9, 0.35);
        const auto a = graph_to_structure(g);
        const auto td = heuristic_decompose(a, Strategy::MinFill);
        if (td.width() != 2 || a.domain().size() < 3) continue;
        const auto enc = encode(a, normalize_def21(td, a));
        EvalStats st;
        evaluate(prog, enc.structure, &st);
        EXPECT_LE(st.decrements, st.body_literals);
    }
}

TEST(Eval, OrderIndependent) {
    const std::vector<std::string> rules{"r(X) :- e(X,Y), s(Y).", "s(X) :- f(X).", "s(X) :- e(X,Y), r(Y).",
                                         "t :- s(X), f(X)."};
    const std::string edb_text = "e(a,b).\ne(b,c).\ne(c,a).\nf(c).\n";
    auto perm = rules;
    std::vector<std::string> first;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 6; ++i) {
        std::string text;
        for (const auto& r : perm) text += r + "\n";
        auto prog = parse_program("@fd e: 1 -> 2.\n@fd e: 2 -> 1.\n" + text);
        const auto m = evaluate(prog, facts(edb_text));
        if (i == 0)
            first = sorted(m.facts());
        else
            EXPECT_EQ(sorted(m.facts()), first);
        std::shuffle(perm.begin(), perm.end(), rng);
    }
    EXPECT_NE(std::find(first.begin(), first.end(), "t"), first.end());
}

TEST(Eval, MonotoneAndContainsEdb) {
    const auto edb = facts("e(a,b).\ne(b,c).\n");
    const auto base = parse_program("@fd e: 1 -> 2.\np(X) :- e(X,Y).\n");
    const auto more = parse_program("@fd e: 1 -> 2.\np(X) :- e(X,Y).\nq(Y) :- e(X,Y), p(X).\n");
    const auto m1 = evaluate(base, edb), m2 = evaluate(more, edb);
    for (const auto& f : m1.facts()) EXPECT_TRUE(std::find(m2.facts().begin(), m2.facts().end(), f) != m2.facts().end()) << f;
    EXPECT_TRUE(m1.contains("e", {"a", "b"}));
}

TEST(Eval, ThreeColSuccess) {
    for (auto [name, want] : std::vector<std::pair<std::string, bool>>{{"k3.edges", true}, {"k4.edges", false}}) {
        const auto g = t::read_graph(name);
        const auto a = graph_to_structure(g);
        const auto nt = normalize_def21(heuristic_decompose(a, Strategy::MinFill), a);
        const auto enc = encode(a, nt);
        const auto m = evaluate(parse_program(three_col_program(nt.width)), enc.structure);
        EXPECT_EQ(m.contains("success"), want) << name;
    }
}

TEST(Ground, RuleBound) {
    const auto enc = example41();
    const auto prog = parse_program(three_col_program(2));
    const auto g = ground(prog, enc.structure);
    EXPECT_LE(g.rules.size(), prog.rules.size() * enc.structure.facts().size());
    for (std::size_t r = 0; r < prog.rules.size(); ++r) EXPECT_LE(g.per_rule[r], std::max<std::size_t>(g.guard_facts[r], 1));
}
