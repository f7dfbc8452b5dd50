#include <algorithm>

#include "mdtw/error.hpp"
#include "mdtw/solvers.hpp"
#include "mdtw/tautd.hpp"

namespace mdtw {

namespace {

std::uint32_t expand(std::uint32_t m, int p) {
    const std::uint32_t low = m & ((1u << p) - 1);
    return low | ((m >> p) << (p + 1));
}

std::uint32_t shrink(std::uint32_t m, int p) {
    const std::uint32_t low = m & ((1u << p) - 1);
    return low | ((m >> (p + 1)) << p);
}

int position(const std::vector<ElemId>& bag, ElemId e) {
    const auto it = std::lower_bound(bag.begin(), bag.end(), e);
    if (it == bag.end() || *it != e) throw InvalidArgument("element missing from bag");
    return static_cast<int>(it - bag.begin());
}

std::uint32_t adjacency_mask(const Graph& g, const std::vector<ElemId>& bag, int p) {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < bag.size(); ++i)
        if (static_cast<int>(i) != p && g.adjacent(static_cast<int>(bag[static_cast<std::size_t>(p)]), static_cast<int>(bag[i])))
            m |= 1u << i;
    return m;
}

void normalize(std::vector<ColorTuple>& t) {
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
}

}  // namespace

bool allowed(std::uint32_t x, const std::vector<ElemId>& bag, const Graph& g) {
    for (std::size_t i = 0; i < bag.size(); ++i) {
        if (!(x >> i & 1)) continue;
        for (std::size_t j = i + 1; j < bag.size(); ++j)
            if ((x >> j & 1) && g.adjacent(static_cast<int>(bag[i]), static_cast<int>(bag[j]))) return false;
    }
    return true;
}

NodeTable<ColorTuple> three_col_solve_up(const Graph& g, const ModifiedTD& m) {
    const auto& td = m.td;
    for (const auto& bag : td.bags) {
        if (bag.size() > 20) throw InvalidArgument("bag too large for the coloring tables");
        for (auto e : bag)
            if (e >= g.vertex_count()) throw InvalidArgument("invalid decomposition: bag element is not a vertex");
    }
    NodeTable<ColorTuple> tab;
    tab.at.assign(td.size(), {});
    for (NodeId v : td.postorder()) {
        const auto& bag = td.bags[v];
        auto& out = tab.at[v];
        switch (m.kind[v]) {
            case NodeKind::Leaf: {
                const auto n = bag.size();
                std::size_t total = 1;
                for (std::size_t i = 0; i < n; ++i) total *= 3;
                for (std::size_t code = 0; code < total; ++code) {
                    ColorTuple t;
                    std::size_t c = code;
                    for (std::size_t i = 0; i < n; ++i, c /= 3) {
                        auto& cls = c % 3 == 0 ? t.r : c % 3 == 1 ? t.g : t.b;
                        cls |= 1u << i;
                    }
                    if (allowed(t.r, bag, g) && allowed(t.g, bag, g) && allowed(t.b, bag, g)) out.push_back(t);
                }
                break;
            }
            case NodeKind::Intro: {
                const int p = position(bag, m.elem[v]);
                const auto adj = adjacency_mask(g, bag, p);
                for (const auto& c : tab.at[td.children[v][0]]) {
                    const ColorTuple base{expand(c.r, p), expand(c.g, p), expand(c.b, p)};
                    if (!(base.r & adj)) out.push_back({base.r | 1u << p, base.g, base.b});
                    if (!(base.g & adj)) out.push_back({base.r, base.g | 1u << p, base.b});
                    if (!(base.b & adj)) out.push_back({base.r, base.g, base.b | 1u << p});
                }
                break;
            }
            case NodeKind::Remove: {
                const auto& cbag = td.bags[td.children[v][0]];
                const int p = position(cbag, m.elem[v]);
                for (const auto& c : tab.at[td.children[v][0]])
                    out.push_back({shrink(c.r, p), shrink(c.g, p), shrink(c.b, p)});
                break;
            }
            case NodeKind::Branch: {
                const auto& a = tab.at[td.children[v][0]];
                const auto& b = tab.at[td.children[v][1]];
                std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
                break;
            }
            case NodeKind::Copy:
                out = tab.at[td.children[v][0]];
                break;
        }
        normalize(out);
    }
    return tab;
}

bool three_col_decide(const Graph& g, const ModifiedTD& td) {
    if (g.vertex_count() == 0) return true;
    return !three_col_solve_up(g, td).at[td.td.root].empty();
}

std::string three_col_program(int width) {
    const int n = width + 1;
    const char colors[] = {'r', 'g', 'b'};
    std::vector<std::string> x(n), y(n);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = "X" + std::to_string(i);
    auto tuple = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& e : v) s += "," + e;
        return s;
    };
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    auto decode = [&](std::size_t code) {
        std::vector<int> c(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i, code /= 3) c[static_cast<std::size_t>(i)] = static_cast<int>(code % 3);
        return c;
    };
    auto name = [&](const std::vector<int>& c) {
        std::string s = "solve_";
        for (int k : c) s += colors[k];
        return s;
    };
    std::string out = "% 3-colorability over tau_td, width " + std::to_string(width) + "\n";
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (std::size_t code = 0; code < total; ++code) {
        const auto c = decode(code);
        const std::string head = name(c) + "(V)";
        const std::string bag = "bag(V" + tuple(x) + ")";
        // leaf
        out += head + " :- leaf(V), " + bag;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (c[static_cast<std::size_t>(i)] == c[static_cast<std::size_t>(j)])
                    out += ", not e(X" + std::to_string(i) + ",X" + std::to_string(j) + ")";
        out += ".\n";
        // permutation: child tuple Y_i = X_perm(i)
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        while (std::next_permutation(perm.begin(), perm.end())) {
            std::vector<std::string> ys;
            std::vector<int> cc;
            for (int i = 0; i < n; ++i) {
                ys.push_back(x[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
                cc.push_back(c[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
            }
            out += head + " :- " + bag + ", child1(V1,V), bag(V1" + tuple(ys) + "), " + name(cc) + "(V1).\n";
        }
        // element replacement at position 0
        for (int k = 0; k < 3; ++k) {
            auto ys = x;
            ys[0] = "Y0";
            auto cc = c;
            cc[0] = k;
            out += head + " :- " + bag + ", child1(V1,V), bag(V1" + tuple(ys) + "), not bag(V1" + tuple(x) + "), " +
                   name(cc) + "(V1)";
            for (int j = 1; j < n; ++j)
                if (c[static_cast<std::size_t>(j)] == c[0]) out += ", not e(X0,X" + std::to_string(j) + ")";
            out += ".\n";
        }
        // branch
        out += head + " :- " + bag + ", child1(V1,V), child2(V2,V), " + name(c) + "(V1), " + name(c) + "(V2).\n";
        out += "success :- root(V), " + name(c) + "(V).\n";
    }
    return out;
}

bool three_col_via_engine(const Graph& g, const NormalizedTD& td, EvalStats* stats) {
    if (g.vertex_count() == 0) return true;
    const auto enc = encode(graph_to_structure(g), td);
    auto program = parse_program(three_col_program(td.width));
    const auto model = evaluate(program, enc.structure, stats);
    return model.contains("success");
}

}  // namespace mdtw
