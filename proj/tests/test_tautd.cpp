#include <gtest/gtest.h>

#include <random>

#include "mdtw/engine.hpp"
#include "mdtw/tautd.hpp"
#include "test_support.hpp"

using namespace mdtw;
namespace t = mdtw::testing;

namespace {

std::size_t count(const TauStructure& a, const std::string& pred) {
    const auto p = a.find_predicate(pred);
    return p ? a.count(*p) : 0;
}

bool has(const TauStructure& a, const std::string& pred, const std::vector<std::string>& args) {
    const auto p = a.find_predicate(pred);
    if (!p) return false;
    Fact f{*p, {}};
    for (const auto& n : args) {
        const auto e = a.find_element(n);
        if (!e) return false;
        f.args.push_back(*e);
    }
    return a.contains(f);
}

}  // namespace

TEST(Encode, Example41Facts) {
    const auto a = schema_to_structure(t::example21());
    const auto nt = normalize_def21(t::fig1(), a);
    const auto enc = encode(a, nt);
    const auto& s = enc.structure;
    EXPECT_TRUE(has(s, "root", {"s1"}));
    EXPECT_TRUE(has(s, "bag", {"s1", "f3", "d", "e"}));
    EXPECT_TRUE(has(s, "child1", {"s2", "s1"}));
    EXPECT_EQ(count(s, "leaf"), 3u);
    EXPECT_EQ(count(s, "root"), 1u);
    EXPECT_EQ(count(s, "bag"), 22u);
    EXPECT_TRUE(s.find_element("s22").has_value());
    EXPECT_FALSE(s.find_element("s23").has_value());
    // root is a branch: exactly one second child
    std::size_t root_child2 = 0;
    const auto root = *s.find_element("s1");
    for (const auto& f : s.facts())
        if (f.pred == *s.find_predicate("child2") && f.args[1] == root) ++root_child2;
    EXPECT_EQ(root_child2, 1u);
    EXPECT_TRUE(enc.renamed.empty());
}

TEST(Encode, ExactFactCount) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 30; ++i) {
        const auto a = graph_to_structure(t::random_graph(rng, 8, 0.4));
        const auto td = t::random_td(a, rng);
        if (static_cast<int>(a.domain().size()) < td.width() + 1) continue;
        const auto nt = normalize_def21(td, a);
        const auto enc = encode(a, nt);
        const auto n = nt.td.size();
        EXPECT_EQ(enc.structure.facts().size(), a.facts().size() + (n - 1) + n + 1 + nt.td.leaf_count());
        EXPECT_EQ(count(enc.structure, "child1") + count(enc.structure, "child2"), n - 1);
        EXPECT_EQ(enc.structure.find_predicate("bag").has_value(), true);
        EXPECT_EQ(enc.structure.signature()[*enc.structure.find_predicate("bag")].arity, nt.width + 2);
    }
}

TEST(Encode, SingleNode) {
    const auto a = graph_to_structure(t::read_graph("k3.edges"));
    TreeDecomposition td;
    td.add_node({0, 1, 2});
    const auto enc = encode(a, normalize_def21(td, a));
    EXPECT_TRUE(has(enc.structure, "root", {"s1"}));
    EXPECT_TRUE(has(enc.structure, "leaf", {"s1"}));
    EXPECT_EQ(count(enc.structure, "bag"), 1u);
    EXPECT_EQ(enc.structure.facts().size(), 6u + 3u);
}

TEST(Encode, RenamesCollisions) {
    const auto g = parse_graph("s1 s2\ns2 x\n");
    const auto a = graph_to_structure(g);
    TreeDecomposition td;
    td.add_node({0, 1});
    td.add_node({1, 2});
    td.attach(0, 1);
    const auto enc = encode(a, normalize_def21(td, a));
    EXPECT_FALSE(enc.renamed.empty());
    EXPECT_EQ(enc.renamed.front().first, "s1");
    EXPECT_EQ(enc.renamed.front().second, "s1_");
    EXPECT_TRUE(has(enc.structure, "root", {"s1_"}));
}

TEST(Encode, FactsParseBack) {
    const auto a = schema_to_structure(t::example21());
    const auto enc = encode(a, normalize_def21(t::fig1(), a));
    const auto text = to_datalog_facts(enc.structure);
    const auto p = parse_program(text);
    EXPECT_EQ(p.rules.size(), enc.structure.facts().size());
    EXPECT_EQ(datalog_constant("Abc"), "\"Abc\"");
    EXPECT_EQ(datalog_constant("f3"), "f3");
}
