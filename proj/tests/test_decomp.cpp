#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mdtw/decomp.hpp"
#include "mdtw/error.hpp"
#include "test_support.hpp"

using namespace mdtw;
namespace t = mdtw::testing;

namespace {

TreeDecomposition chain(const std::vector<std::vector<ElemId>>& bags) {
    TreeDecomposition td;
    for (std::size_t i = 0; i < bags.size(); ++i) {
        const auto n = td.add_node(bags[i]);
        if (i > 0) td.attach(n - 1, n);
    }
    return td;
}

/// Structure over named elements with one fact per listed tuple.
TauStructure structure(const std::vector<std::string>& names, const std::vector<std::vector<std::string>>& facts) {
    TauStructure a;
    for (const auto& n : names) a.add_element(n);
    for (const auto& f : facts) {
        const auto p = a.add_predicate("r" + std::to_string(f.size()), static_cast<int>(f.size()));
        std::vector<ElemId> args;
        for (const auto& x : f) args.push_back(*a.find_element(x));
        a.add_fact(p, args);
    }
    return a;
}

bool same_shape(const NormalizedTD& x, const NormalizedTD& y) {
    if (x.td.size() != y.td.size()) return false;
    const auto px = x.td.preorder(), py = y.td.preorder();
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (x.td.bags[px[i]] != y.td.bags[py[i]]) return false;
        if (x.kind[px[i]] != y.kind[py[i]]) return false;
        if (x.td.children[px[i]].size() != y.td.children[py[i]].size()) return false;
    }
    return true;
}

}  // namespace

TEST(Heuristic, Example21WidthAtLeastTwo) {
    const auto a = schema_to_structure(t::example21());
    for (auto st : {Strategy::MinDegree, Strategy::MinFill}) {
        const auto td = heuristic_decompose(a, st);
        const auto r = validate(a, td);
        EXPECT_TRUE(r.valid()) << r.to_string();
        EXPECT_GE(td.width(), 2);
    }
}

TEST(Heuristic, EdgelessAndClique) {
    const auto edgeless = graph_to_structure(parse_graph("v a\nv b\nv c\nv d\n"));
    EXPECT_EQ(heuristic_decompose(edgeless, Strategy::MinFill).width(), 0);
    EXPECT_TRUE(validate(edgeless, heuristic_decompose(edgeless, Strategy::MinDegree)).valid());
    const auto k3 = graph_to_structure(t::read_graph("k3.edges"));
    const auto td = heuristic_decompose(k3, Strategy::MinDegree);
    EXPECT_EQ(td.width(), 2);
    EXPECT_TRUE(validate(k3, td).valid());
}

TEST(Heuristic, Deterministic) {
    const auto a = graph_to_structure(t::read_graph("petersen.edges"));
    const auto x = heuristic_decompose(a, Strategy::MinFill), y = heuristic_decompose(a, Strategy::MinFill);
    EXPECT_EQ(x.bags, y.bags);
    EXPECT_EQ(x.parent, y.parent);
}

TEST(Heuristic, NotBelowExact) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 40; ++i) {
        const auto g = t::random_graph(rng, 9, 0.35);
        const auto a = graph_to_structure(g);
        const auto ex = exact_treewidth(a, 12);
        EXPECT_TRUE(validate(a, ex.td).valid());
        EXPECT_EQ(ex.td.width(), ex.treewidth);
        for (auto st : {Strategy::MinDegree, Strategy::MinFill}) EXPECT_GE(heuristic_decompose(a, st).width(), ex.treewidth);
    }
}

TEST(Exact, Caps) {
    std::mt19937_64 rng(1);
    const auto a = graph_to_structure(t::random_graph(rng, 14, 0.2));
    EXPECT_THROW(exact_treewidth(a, 12), CapExceeded);
}

TEST(Validate, Fig1) {
    const auto a = schema_to_structure(t::example21());
    const auto r = validate(a, t::fig1());
    EXPECT_TRUE(r.valid()) << r.to_string();
    EXPECT_EQ(r.width, 2);
    EXPECT_EQ(exact_treewidth(a, 12).treewidth, 2);
}

TEST(Validate, MutatedFig1NamesFact) {
    const auto a = schema_to_structure(t::example21());
    auto td = t::fig1();
    // drop a from leaf (a b f1)
    auto& bag = td.bags[3];
    bag.erase(std::find(bag.begin(), bag.end(), *a.find_element("a")));
    const auto r = validate(a, td);
    ASSERT_FALSE(r.valid());
    bool uncovered = false;
    for (const auto& v : r.violations)
        if (v.kind == Violation::Kind::UncoveredFact && v.message.find("lh(a,f1)") != std::string::npos) uncovered = true;
    EXPECT_TRUE(uncovered) << r.to_string();
}

TEST(Validate, OneBagAndDisconnected) {
    const auto a = schema_to_structure(t::example21());
    TreeDecomposition one;
    std::vector<ElemId> all(a.domain().size());
    std::iota(all.begin(), all.end(), 0);
    one.add_node(all);
    EXPECT_TRUE(validate(a, one).valid());

    const auto s = structure({"x", "y", "z"}, {{"x", "y"}, {"y", "z"}});
    const auto bad = chain({{0, 1}, {1, 2}, {0}});
    const auto r = validate(s, bad);
    ASSERT_FALSE(r.valid());
    EXPECT_EQ(r.violations.front().kind, Violation::Kind::Disconnected);
}

TEST(TdFile, RoundTrip) {
    const auto a = schema_to_structure(t::example21());
    const auto td = t::fig1();
    const auto text = write_td(td, a.domain().size());
    EXPECT_EQ(text.rfind("s td 8 3 11", 0), 0u);
    const auto back = read_td(text);
    EXPECT_EQ(back.bags, td.bags);
    EXPECT_EQ(back.parent, td.parent);
    EXPECT_THROW(read_td("s td 1 1 1\nb 1 2\n"), ParseError);
    EXPECT_THROW(read_td("b 1 1\n"), ParseError);
}

TEST(Reroot, KeepsValidity) {
    const auto a = schema_to_structure(t::example21());
    const auto td = t::fig1();
    for (NodeId n = 0; n < td.size(); ++n) {
        const auto r = reroot(td, n);
        EXPECT_EQ(r.root, n);
        EXPECT_TRUE(validate(a, r).valid());
    }
}

TEST(Def21, Fig1Gives22Nodes) {
    const auto a = schema_to_structure(t::example21());
    const auto nt = normalize_def21(t::fig1(), a);
    EXPECT_EQ(nt.td.size(), 22u);
    EXPECT_EQ(nt.width, 2);
    EXPECT_EQ(nt.td.leaf_count(), 3u);
    EXPECT_EQ(nt.kind[nt.td.root], Def21Kind::Branch);
    EXPECT_TRUE(def21_violations(nt).empty());
    EXPECT_TRUE(validate(a, nt.td).valid());
}

TEST(Def21, Idempotent) {
    const auto a = schema_to_structure(t::example21());
    const auto nt = normalize_def21(t::fig1(), a);
    const auto again = normalize_def21(nt.td, a);
    EXPECT_TRUE(same_shape(nt, again));
}

TEST(Def21, TwoNodeChainOneReplace) {
    const auto a = structure({"a", "b", "c", "d"}, {{"a", "b", "c"}, {"a", "b", "d"}});
    const auto nt = normalize_def21(chain({{0, 1, 2}, {0, 1, 3}}), a);
    EXPECT_TRUE(def21_violations(nt).empty());
    EXPECT_TRUE(validate(a, nt.td).valid());
    int replace = 0;
    for (auto k : nt.kind) replace += k == Def21Kind::Replace;
    EXPECT_EQ(replace, 1);
    EXPECT_EQ(nt.width, 2);
}

TEST(Def21, Errors) {
    const auto a = structure({"a", "b"}, {{"a", "b"}});
    EXPECT_THROW(normalize_def21(TreeDecomposition{}, a), InvalidArgument);
}

TEST(Def21, RandomValidLinear) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 60; ++i) {
        const auto g = t::random_graph(rng, 10, 0.3);
        const auto a = graph_to_structure(g);
        const auto td = t::random_td(a, rng);
        if (static_cast<int>(a.domain().size()) < td.width() + 1) continue;
        const auto nt = normalize_def21(td, a);
        EXPECT_TRUE(def21_violations(nt).empty());
        EXPECT_TRUE(validate(a, nt.td).valid());
        EXPECT_EQ(nt.width, td.width());
        EXPECT_LE(nt.td.size(), 8 * (td.size() + td.total_bag_size()));
    }
}

TEST(Modified, SingleNodeAndChain) {
    TreeDecomposition one;
    one.add_node({0, 1});
    const auto m = normalize_modified(one);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(m.kind[0], NodeKind::Leaf);

    // {a,b} -> {a,c}: remove b, then intro c
    const auto c = normalize_modified(chain({{0, 1}, {0, 2}}));
    ASSERT_EQ(c.size(), 3u);
    const auto order = c.td.preorder();
    EXPECT_EQ(c.td.bags[order[0]], (std::vector<ElemId>{0, 1}));
    // kinds are read bottom-up: leaf {a,c}, remove c, introduce b
    EXPECT_EQ(c.kind[order[0]], NodeKind::Intro);
    EXPECT_EQ(c.elem[order[0]], 1u);
    EXPECT_EQ(c.td.bags[order[1]], (std::vector<ElemId>{0}));
    EXPECT_EQ(c.kind[order[1]], NodeKind::Remove);
    EXPECT_EQ(c.elem[order[1]], 2u);
    EXPECT_EQ(c.kind[order[2]], NodeKind::Leaf);
    EXPECT_EQ(c.td.bags[order[2]], (std::vector<ElemId>{0, 2}));
}

TEST(Modified, Fig2ToFig4Shape) {
    const auto a = schema_to_structure(t::example21());
    const auto nt = normalize_def21(t::fig1(), a);
    const auto m = normalize_modified(nt.td);
    EXPECT_TRUE(validate(a, m.td).valid());
    EXPECT_EQ(m.width(), 2);
    const auto counts = m.kind_counts();
    EXPECT_EQ(counts.at("leaf"), 3u);
    EXPECT_EQ(counts.at("branch"), 2u);
    for (NodeId n = 0; n < m.size(); ++n) {
        if (m.kind[n] == NodeKind::Branch)
            for (auto c : m.td.children[n]) EXPECT_EQ(m.td.bags[c], m.td.bags[n]);
        if (m.kind[n] == NodeKind::Intro || m.kind[n] == NodeKind::Remove) {
            ASSERT_EQ(m.td.children[n].size(), 1u);
            const auto& child = m.td.bags[m.td.children[n][0]];
            EXPECT_EQ(std::max(child.size(), m.td.bags[n].size()) - std::min(child.size(), m.td.bags[n].size()), 1u);
        }
    }
}

TEST(Modified, RandomValidAndIntroducedOnce) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 60; ++i) {
        const auto a = graph_to_structure(t::random_graph(rng, 10, 0.3));
        const auto td = t::random_td(a, rng);
        const auto m = normalize_modified(td);
        EXPECT_TRUE(validate(a, m.td).valid());
        EXPECT_EQ(m.width(), td.width());
        // classify_modified accepts its own output
        EXPECT_NO_THROW(classify_modified(m.td));
        // an element never reappears below a node where it is absent on the same path
        for (NodeId leaf = 0; leaf < m.size(); ++leaf) {
            if (!m.td.children[leaf].empty()) continue;
            std::set<ElemId> gone;
            std::set<ElemId> seen;
            for (NodeId n = leaf; n != kNoNode; n = m.td.parent[n]) {
                std::set<ElemId> here(m.td.bags[n].begin(), m.td.bags[n].end());
                for (auto e : seen)
                    if (!here.count(e)) gone.insert(e);
                for (auto e : here) EXPECT_FALSE(gone.count(e)) << "element " << e << " reintroduced";
                seen.insert(here.begin(), here.end());
            }
        }
    }
}

TEST(FdClosure, AddsRhsAlongSubtree) {
    const auto s = parse_schema("atts: a,b,c\na -> c\n");
    const auto a = schema_to_structure(s);
    const auto m = normalize_modified(chain({t::elems(a, "f1 a c"), t::elems(a, "c"), t::elems(a, "c b")}));
    EXPECT_TRUE(is_fd_bag_closed(m, s));
    const auto same = enforce_fd_bag_closure(m, s);
    EXPECT_EQ(same.td.bags, m.td.bags);

    TreeDecomposition split;
    split.add_node(t::elems(a, "f1 a"));
    split.add_node(t::elems(a, "f1 b"));
    split.add_node(t::elems(a, "f1 c"));
    split.attach(0, 1);
    split.attach(1, 2);
    EXPECT_TRUE(validate(a, split).valid());
    const auto m2 = normalize_modified(split);
    EXPECT_FALSE(is_fd_bag_closed(m2, s));
    const auto closed = enforce_fd_bag_closure(m2, s);
    EXPECT_TRUE(is_fd_bag_closed(closed, s));
    EXPECT_TRUE(validate(a, closed.td).valid());
    const auto c = *a.find_element("c"), f1 = *a.find_element("f1");
    for (const auto& bag : closed.td.bags)
        if (std::find(bag.begin(), bag.end(), f1) != bag.end()) EXPECT_NE(std::find(bag.begin(), bag.end(), c), bag.end());
}

TEST(FdClosure, Example21AtMostDoubleWidth) {
    const auto s = t::example21();
    const auto a = schema_to_structure(s);
    const auto m = normalize_modified(normalize_def21(t::fig1(), a).td);
    const auto closed = enforce_fd_bag_closure(m, s);
    EXPECT_TRUE(validate(a, closed.td).valid());
    EXPECT_TRUE(is_fd_bag_closed(closed, s));
    EXPECT_LE(closed.width(), 5);
}

TEST(Enumeration, BranchRootGetsParent) {
    TreeDecomposition td;
    td.add_node({0, 1});
    td.add_node({0, 1});
    td.add_node({0, 1});
    td.attach(0, 1);
    td.attach(0, 2);
    const auto m = classify_modified(td);
    ASSERT_EQ(m.kind[m.td.root], NodeKind::Branch);
    const std::vector<ElemId> req{0, 1};
    const auto p = prepare_enumeration(m, req);
    EXPECT_NE(p.kind[p.td.root], NodeKind::Branch);
    EXPECT_TRUE(is_enumeration_ready(p, req));
    EXPECT_EQ(p.td.bags[p.td.root], (std::vector<ElemId>{0, 1}));
}

TEST(Enumeration, InternalOnlyGetsLeaf) {
    // 2 occurs only in the root
    const auto m = normalize_modified(chain({{0, 1, 2}, {0, 1}}));
    const std::vector<ElemId> req{0, 1, 2};
    EXPECT_FALSE(is_enumeration_ready(m, req));
    const auto p = prepare_enumeration(m, req);
    EXPECT_TRUE(is_enumeration_ready(p, req));
    bool leaf_with_2 = false;
    for (NodeId n = 0; n < p.size(); ++n)
        if (p.kind[n] == NodeKind::Leaf && std::count(p.td.bags[n].begin(), p.td.bags[n].end(), 2u)) leaf_with_2 = true;
    EXPECT_TRUE(leaf_with_2);
    EXPECT_NO_THROW(classify_modified(p.td));
}

TEST(Enumeration, IdempotentAndConformingUnchanged) {
    const auto s = t::example21();
    const auto a = schema_to_structure(s);
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        const auto td = t::random_td(a, rng, false);
        const auto p = prepare_enumeration(enforce_fd_bag_closure(normalize_modified(td), s), s);
        EXPECT_TRUE(validate(a, p.td).valid());
        const auto q = prepare_enumeration(p, s);
        EXPECT_EQ(q.td.bags, p.td.bags);
        EXPECT_EQ(q.td.parent, p.td.parent);
    }
}

TEST(Generator, Table1Rows) {
    const auto g1 = generate_benchmark(3, 1, 3, 1);
    EXPECT_EQ(g1.td.size(), 3u);
    const auto last = generate_benchmark(93, 31, 3, 1);
    EXPECT_NEAR(static_cast<double>(last.td.size()), 301.0, 30.1);
    for (const auto& inst : {g1, last}) {
        const auto a = schema_to_structure(inst.schema);
        EXPECT_TRUE(validate(a, inst.td.td).valid());
        EXPECT_EQ(inst.td.width(), 3);
        EXPECT_TRUE(is_fd_bag_closed(inst.td, inst.schema));
    }
    EXPECT_EQ(last.schema.attribute_count(), 93u);
    EXPECT_EQ(last.schema.fd_count(), 31u);
}

TEST(Generator, DeterministicAndFdFree) {
    const auto x = generate_benchmark(33, 11, 3, 42), y = generate_benchmark(33, 11, 3, 42);
    EXPECT_EQ(x.schema, y.schema);
    EXPECT_EQ(x.td.td.bags, y.td.td.bags);
    const auto f = generate_benchmark(6, 0, 1, 1);
    EXPECT_EQ(f.schema.fd_count(), 0u);
    EXPECT_TRUE(validate(schema_to_structure(f.schema), f.td.td).valid());
}

TEST(Generator, Infeasible) {
    EXPECT_THROW(generate_benchmark(3, 1, 1, 1), InvalidArgument);
    EXPECT_THROW(generate_benchmark(3, 5, 3, 1), InvalidArgument);
    EXPECT_THROW(generate_benchmark(3, 1, 0, 1), InvalidArgument);
}
