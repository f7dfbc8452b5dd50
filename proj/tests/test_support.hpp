#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mdtw/decomp.hpp"
#include "mdtw/structures.hpp"

namespace mdtw::testing {

inline std::string data_path(const std::string& name) { return std::string(MDTW_TEST_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// R = abcdeg, ab->c, c->b, cd->e, de->g, g->e
inline Schema example21() { return parse_schema(read_file(data_path("example21.fd"))); }

inline TreeDecomposition fig1() { return read_td(read_file(data_path("fig1.td"))); }

inline Graph read_graph(const std::string& name) { return parse_graph(read_file(data_path(name))); }

inline std::vector<ElemId> elems(const TauStructure& a, const std::string& names) {
    std::vector<ElemId> out;
    std::istringstream in(names);
    std::string t;
    while (in >> t) out.push_back(*a.find_element(t));
    return out;
}

inline std::vector<int> atts(const Schema& s, const std::string& names) {
    std::vector<int> out;
    std::istringstream in(names);
    std::string t;
    while (in >> t) out.push_back(*s.find_attribute(t));
    std::sort(out.begin(), out.end());
    return out;
}

inline Schema random_schema(std::mt19937_64& rng, int max_att, int max_fd, int max_lhs = 3) {
    std::uniform_int_distribution<int> na(1, max_att);
    const int n = na(rng);
    Schema s;
    for (int i = 0; i < n; ++i) s.add_attribute("a" + std::to_string(i));
    const int m = std::uniform_int_distribution<int>(0, max_fd)(rng);
    for (int k = 0; k < m; ++k) {
        const int rhs = std::uniform_int_distribution<int>(0, n - 1)(rng);
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
        pool.erase(pool.begin() + rhs);
        if (pool.empty()) break;
        std::shuffle(pool.begin(), pool.end(), rng);
        const int len = std::uniform_int_distribution<int>(1, std::min<int>(max_lhs, static_cast<int>(pool.size())))(rng);
        pool.resize(static_cast<std::size_t>(len));
        s.add_fd(pool, rhs);
    }
    return s;
}

inline Graph random_graph(std::mt19937_64& rng, int n, double p) {
    Graph g;
    for (int i = 0; i < n; ++i) g.add_vertex("v" + std::to_string(i));
    std::bernoulli_distribution coin(p);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) g.add_edge(i, j);
    return g;
}

/// Heuristic, random elimination order, then a random re-rooting.
inline TreeDecomposition random_td(const TauStructure& a, std::mt19937_64& rng, bool random_order = true) {
    TreeDecomposition td;
    switch (std::uniform_int_distribution<int>(0, random_order ? 2 : 1)(rng)) {
    case 0:
        td = heuristic_decompose(a, Strategy::MinDegree);
        break;
    case 1:
        td = heuristic_decompose(a, Strategy::MinFill);
        break;
    default: {
        std::vector<ElemId> order(a.domain().size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        td = decompose_from_order(a, order);
    }
    }
    if (td.size() > 1) td = reroot(td, static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, td.size() - 1)(rng)));
    return td;
}

}  // namespace mdtw::testing
