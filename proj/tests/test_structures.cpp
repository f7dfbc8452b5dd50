#include <gtest/gtest.h>

#include <random>

#include "mdtw/error.hpp"
#include "mdtw/structures.hpp"
#include "test_support.hpp"

using namespace mdtw;
using mdtw::testing::example21;

namespace {

bool has(const TauStructure& a, const std::string& pred, std::vector<std::string> args) {
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

TEST(Schema, ParsesExample21) {
    const auto s = example21();
    ASSERT_EQ(s.attribute_count(), 6u);
    ASSERT_EQ(s.fd_count(), 5u);
    EXPECT_EQ(s.attributes(), (std::vector<std::string>{"a", "b", "c", "d", "e", "g"}));
    EXPECT_EQ(s.fds()[0].id, "f1");
    EXPECT_EQ(s.fds()[0].lhs, (std::vector<int>{0, 1}));
    EXPECT_EQ(s.fds()[0].rhs, 2);
    EXPECT_EQ(s.fds()[4].id, "f5");
}

TEST(Schema, RoundTrip) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const auto s = mdtw::testing::random_schema(rng, 8, 6);
        EXPECT_EQ(parse_schema(serialize_schema(s)), s);
    }
    EXPECT_EQ(parse_schema(serialize_schema(example21())), example21());
}

TEST(Schema, CommentsAndHeader) {
    const auto s = parse_schema("# c\natts: x, y ,z\nx -> y  # trailing\n\n");
    EXPECT_EQ(s.attribute_count(), 3u);
    EXPECT_EQ(s.fd_count(), 1u);
}

TEST(Schema, Errors) {
    EXPECT_THROW(parse_schema("a,b c\n"), ParseError);
    EXPECT_THROW(parse_schema("a -> b,c\n"), ParseError);
    EXPECT_THROW(parse_schema(" -> b\n"), ParseError);
    Schema s;
    s.add_attribute("a");
    EXPECT_THROW(s.add_attribute("a"), InvalidArgument);
}

TEST(SchemaToStructure, Example21Facts) {
    const auto a = schema_to_structure(example21());
    for (auto [x, f] : std::vector<std::pair<std::string, std::string>>{
             {"a", "f1"}, {"b", "f1"}, {"c", "f2"}, {"c", "f3"}, {"d", "f3"}, {"d", "f4"}, {"e", "f4"}, {"g", "f5"}})
        EXPECT_TRUE(has(a, "lh", {x, f})) << x << f;
    for (auto [x, f] : std::vector<std::pair<std::string, std::string>>{
             {"c", "f1"}, {"b", "f2"}, {"e", "f3"}, {"g", "f4"}, {"e", "f5"}})
        EXPECT_TRUE(has(a, "rh", {x, f})) << x << f;
    EXPECT_EQ(a.count(*a.find_predicate("lh")), 8u);
    EXPECT_EQ(a.count(*a.find_predicate("rh")), 5u);
    EXPECT_EQ(a.domain().size(), 11u);
}

TEST(SchemaToStructure, FactCount) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 30; ++i) {
        const auto s = mdtw::testing::random_schema(rng, 8, 6);
        std::size_t lhs = 0;
        for (const auto& f : s.fds()) lhs += f.lhs.size();
        EXPECT_EQ(schema_to_structure(s).facts().size(), s.fd_count() * 2 + s.attribute_count() + lhs);
    }
}

TEST(SchemaToStructure, FdFree) {
    const auto a = schema_to_structure(parse_schema("atts: a\n"));
    ASSERT_EQ(a.facts().size(), 1u);
    EXPECT_TRUE(has(a, "att", {"a"}));
}

TEST(GraphToStructure, Orientations) {
    EXPECT_EQ(graph_to_structure(mdtw::testing::read_graph("k3.edges")).facts().size(), 6u);
    EXPECT_TRUE(graph_to_structure(parse_graph("v x\n")).facts().empty());
    const auto a = graph_to_structure(parse_graph("1 2\n"));
    EXPECT_TRUE(has(a, "e", {"1", "2"}));
    EXPECT_TRUE(has(a, "e", {"2", "1"}));
    EXPECT_EQ(a.facts().size(), 2u);
}

TEST(Graph, ParseHeaderAndErrors) {
    const auto g = parse_graph("p edge 3 2\n1 2\n2 3\n");
    EXPECT_EQ(g.vertex_count(), 3u);
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_THROW(parse_graph("p edge 3 5\n1 2\n"), ParseError);
    EXPECT_THROW(parse_graph("1 1\n"), ParseError);
    Graph h;
    h.add_vertex("x");
    EXPECT_THROW(h.add_edge(0, 0), InvalidArgument);
    EXPECT_THROW(parse_graph("1 2 3\n"), ParseError);
    const auto rt = parse_graph(serialize_graph(g));
    EXPECT_EQ(rt.edges(), g.edges());
}

TEST(IncidenceGraph, Shapes) {
    const auto path = incidence_graph(parse_schema("a -> b\n"));
    EXPECT_EQ(path.vertex_count(), 3u);
    EXPECT_EQ(path.edge_count(), 2u);
    EXPECT_TRUE(path.adjacent(*path.find_vertex("a"), *path.find_vertex("f1")));
    EXPECT_TRUE(path.adjacent(*path.find_vertex("f1"), *path.find_vertex("b")));
    EXPECT_EQ(incidence_graph(parse_schema("atts: a,b,c\n")).edge_count(), 0u);
    const auto g = incidence_graph(example21());
    EXPECT_EQ(g.edge_count(), 8u + 5u);
}

TEST(IncidenceGraph, Example21Treewidth) {
    const auto g = incidence_graph(example21());
    EXPECT_EQ(exact_treewidth(graph_to_structure(g), 13).treewidth, 2);
}

TEST(TauStructure, Dedup) {
    TauStructure a;
    const auto p = a.add_predicate("p", 1);
    const auto x = a.add_element("x");
    EXPECT_TRUE(a.add_fact(p, {x}));
    EXPECT_FALSE(a.add_fact(p, {x}));
    EXPECT_THROW(a.add_fact(p, {x, x}), InvalidArgument);
    EXPECT_THROW(a.add_predicate("p", 2), InvalidArgument);
}
