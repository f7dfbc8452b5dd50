#include <gtest/gtest.h>

#include <random>

#include "mdtw/error.hpp"
#include "mdtw/oracle.hpp"
#include "test_support.hpp"

using namespace mdtw;
namespace t = mdtw::testing;

TEST(Closure, Example21) {
    const auto s = t::example21();
    EXPECT_EQ(closure(t::atts(s, "a b d"), s), t::atts(s, "a b c d e g"));
    EXPECT_EQ(closure(t::atts(s, "a b"), s), t::atts(s, "a b c"));
    const auto all = t::atts(s, "a b c d e g");
    EXPECT_EQ(closure(all, s), all);
}

TEST(Closure, Laws) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        const auto s = t::random_schema(rng, 8, 6);
        std::vector<int> x, y;
        for (int b = 0; b < static_cast<int>(s.attribute_count()); ++b) {
            if (rng() % 2) x.push_back(b);
            if (rng() % 2 || std::find(x.begin(), x.end(), b) != x.end()) y.push_back(b);
        }
        const auto cx = closure(x, s), cy = closure(y, s);
        EXPECT_TRUE(std::includes(cx.begin(), cx.end(), x.begin(), x.end()));
        EXPECT_TRUE(std::includes(cy.begin(), cy.end(), cx.begin(), cx.end()));
        EXPECT_EQ(closure(cx, s), cx);
    }
}

TEST(Keys, Examples) {
    const auto s = t::example21();
    EXPECT_EQ(all_keys(s), (std::vector<std::vector<int>>{t::atts(s, "a b d"), t::atts(s, "a c d")}));
    const auto free = parse_schema("atts: a,b,c\n");
    EXPECT_EQ(all_keys(free), (std::vector<std::vector<int>>{{0, 1, 2}}));
    EXPECT_EQ(all_keys(parse_schema("a -> b\n")), (std::vector<std::vector<int>>{{0}}));
}

TEST(Keys, MinimalSuperkeys) {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 60; ++i) {
        const auto s = t::random_schema(rng, 8, 6);
        const auto keys = all_keys(s);
        ASSERT_FALSE(keys.empty());
        for (std::size_t k = 1; k < keys.size(); ++k) EXPECT_LE(keys[k - 1].size(), keys[k].size());
        for (const auto& k : keys) {
            EXPECT_EQ(closure(k, s).size(), s.attribute_count());
            for (std::size_t drop = 0; drop < k.size(); ++drop) {
                auto sub = k;
                sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
                EXPECT_LT(closure(sub, s).size(), s.attribute_count());
            }
        }
    }
}

TEST(Keys, Cap) {
    Schema s;
    for (int i = 0; i < 21; ++i) s.add_attribute("x" + std::to_string(i));
    EXPECT_THROW(all_keys(s), CapExceeded);
    EXPECT_THROW(all_keys(t::example21(), 4), CapExceeded);
    EXPECT_NO_THROW(all_keys(t::example21(), 6));
}

TEST(Prime, Examples) {
    const auto s = t::example21();
    EXPECT_EQ(prime_brute(s), t::atts(s, "a b c d"));
    EXPECT_EQ(prime_brute(parse_schema("atts: a,b\n")), (std::vector<int>{0, 1}));
    EXPECT_EQ(prime_brute(parse_schema("a -> b\n")), (std::vector<int>{0}));
}

TEST(Phi, Examples) {
    const auto s = t::example21();
    EXPECT_TRUE(mso_phi_check(s, *s.find_attribute("a")));
    EXPECT_FALSE(mso_phi_check(s, *s.find_attribute("e")));
    EXPECT_TRUE(mso_phi_check(parse_schema("atts: a\n"), 0));
}

TEST(Phi, AgreesWithKeys) {
    std::mt19937_64 rng(15);
    for (int i = 0; i < 150; ++i) {
        const auto s = t::random_schema(rng, 9, 8);
        const auto primes = prime_brute(s);
        for (int b = 0; b < static_cast<int>(s.attribute_count()); ++b)
            EXPECT_EQ(mso_phi_check(s, b), std::find(primes.begin(), primes.end(), b) != primes.end());
    }
}

TEST(ThreeColBrute, Examples) {
    EXPECT_TRUE(three_col_brute(t::read_graph("k3.edges")));
    EXPECT_FALSE(three_col_brute(t::read_graph("k4.edges")));
    EXPECT_TRUE(three_col_brute(parse_graph("1 2\n2 3\n3 4\n4 5\n5 1\n")));
    Graph big;
    for (int i = 0; i < 23; ++i) big.add_vertex(std::to_string(i));
    EXPECT_THROW(three_col_brute(big), CapExceeded);
}

TEST(Regions, SubtreeAndEnvelope) {
    const auto td = t::fig1();
    EXPECT_EQ(subtree_nodes(td, td.root).size(), td.size());
    EXPECT_EQ(envelope_nodes(td, td.root).size(), 1u);
    // node 2 (f1 b c) has two leaf children
    EXPECT_EQ(subtree_nodes(td, 2).size(), 3u);
    EXPECT_EQ(envelope_nodes(td, 2).size(), td.size() - 2);
}
