#include "mdtw/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <set>

#include "mdtw/error.hpp"

namespace mdtw {

namespace {

struct MaskedSchema {
    std::vector<std::uint32_t> lhs;
    std::vector<int> rhs;
    std::uint32_t all = 0;

    explicit MaskedSchema(const Schema& s, std::size_t cap) {
        if (s.attribute_count() > cap)
            throw CapExceeded("schema has " + std::to_string(s.attribute_count()) + " attributes, cap is " +
                              std::to_string(cap));
        if (s.attribute_count() > 31) throw CapExceeded("more than 31 attributes");
        all = s.attribute_count() == 0 ? 0 : (std::uint32_t{1} << s.attribute_count()) - 1;
        for (const auto& f : s.fds()) {
            std::uint32_t m = 0;
            for (int b : f.lhs) m |= 1u << b;
            lhs.push_back(m);
            rhs.push_back(f.rhs);
        }
    }

    std::uint32_t close(std::uint32_t x) const {
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t i = 0; i < lhs.size(); ++i)
                if ((lhs[i] & x) == lhs[i] && !(x >> rhs[i] & 1)) {
                    x |= 1u << rhs[i];
                    grew = true;
                }
        }
        return x;
    }
};

std::vector<int> to_list(std::uint32_t m) {
    std::vector<int> out;
    for (; m; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
}

}  // namespace

std::vector<int> closure(const std::vector<int>& x, const Schema& s) {
    std::vector<bool> in(s.attribute_count(), false);
    for (int b : x) in.at(static_cast<std::size_t>(b)) = true;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& f : s.fds()) {
            if (in[static_cast<std::size_t>(f.rhs)]) continue;
            if (std::all_of(f.lhs.begin(), f.lhs.end(), [&](int b) { return in[static_cast<std::size_t>(b)]; })) {
                in[static_cast<std::size_t>(f.rhs)] = true;
                grew = true;
            }
        }
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < in.size(); ++i)
        if (in[i]) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<std::vector<int>> all_keys(const Schema& s, std::size_t cap) {
    const MaskedSchema ms(s, cap);
    const int n = static_cast<int>(s.attribute_count());
    std::vector<std::uint32_t> keys;
    for (int k = 0; k <= n; ++k) {
        // combinations of size k in lexicographic order
        std::vector<int> idx(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            std::uint32_t m = 0;
            for (int i : idx) m |= 1u << i;
            const bool has_key = std::any_of(keys.begin(), keys.end(), [&](std::uint32_t key) { return (key & m) == key; });
            if (!has_key && ms.close(m) == ms.all) keys.push_back(m);
            int i = k - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
            if (i < 0) break;
            ++idx[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    std::vector<std::vector<int>> out;
    for (auto m : keys) out.push_back(to_list(m));
    return out;
}

std::vector<int> prime_brute(const Schema& s, std::size_t cap) {
    std::uint32_t u = 0;
    for (const auto& k : all_keys(s, cap))
        for (int b : k) u |= 1u << b;
    return to_list(u);
}

bool mso_phi_check(const Schema& s, int attribute, std::size_t cap) {
    const MaskedSchema ms(s, cap);
    if (attribute < 0 || static_cast<std::size_t>(attribute) >= s.attribute_count())
        throw InvalidArgument("attribute index out of range");
    const auto a = 1u << attribute;
    const auto rest = ms.all & ~a;
    for (std::uint32_t y = rest;; y = (y - 1) & rest) {
        if (ms.close(y) == y && ms.close(y | a) == ms.all) return true;
        if (y == 0) break;
    }
    return false;
}

bool three_col_brute(const Graph& g, std::size_t cap) {
    const auto n = g.vertex_count();
    if (n > cap) throw CapExceeded("graph has " + std::to_string(n) + " vertices, cap is " + std::to_string(cap));
    std::vector<int> color(n, -1);
    std::function<bool(std::size_t)> go = [&](std::size_t v) {
        if (v == n) return true;
        for (int c = 0; c < 3; ++c) {
            bool ok = true;
            for (int u : g.neighbours(static_cast<int>(v)))
                if (color[static_cast<std::size_t>(u)] == c) ok = false;
            if (!ok) continue;
            color[v] = c;
            if (go(v + 1)) return true;
            color[v] = -1;
        }
        return false;
    };
    return go(0);
}

std::vector<NodeId> subtree_nodes(const TreeDecomposition& td, NodeId s) {
    std::vector<NodeId> out, stack{s};
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        out.push_back(v);
        for (auto c : td.children[v]) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NodeId> envelope_nodes(const TreeDecomposition& td, NodeId s) {
    const auto sub = subtree_nodes(td, s);
    std::vector<NodeId> out;
    for (NodeId v = 0; v < td.size(); ++v)
        if (v == s || !std::binary_search(sub.begin(), sub.end(), v)) out.push_back(v);
    return out;
}

namespace {

std::vector<ElemId> region_elements(const ModifiedTD& td, const std::vector<NodeId>& region) {
    std::set<ElemId> el;
    for (auto v : region) el.insert(td.td.bags.at(v).begin(), td.td.bags.at(v).end());
    return {el.begin(), el.end()};
}

int bag_position(const std::vector<ElemId>& bag, ElemId e) {
    const auto it = std::lower_bound(bag.begin(), bag.end(), e);
    return it != bag.end() && *it == e ? static_cast<int>(it - bag.begin()) : -1;
}

}  // namespace

std::vector<ColorTuple> property_a_tuples(const Graph& g, const ModifiedTD& td, const std::vector<NodeId>& region,
                                          NodeId s) {
    const auto verts = region_elements(td, region);
    if (verts.size() > 16) throw CapExceeded("region has more than 16 vertices");
    const auto& bag = td.td.bags.at(s);
    std::vector<int> color(verts.size(), -1);
    std::set<ColorTuple> out;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == verts.size()) {
            ColorTuple t;
            for (std::size_t k = 0; k < verts.size(); ++k) {
                const int p = bag_position(bag, verts[k]);
                if (p < 0) continue;
                auto& cls = color[k] == 0 ? t.r : color[k] == 1 ? t.g : t.b;
                cls |= 1u << p;
            }
            out.insert(t);
            return;
        }
        for (int c = 0; c < 3; ++c) {
            bool ok = true;
            for (std::size_t k = 0; k < i && ok; ++k)
                if (color[k] == c && g.adjacent(static_cast<int>(verts[i]), static_cast<int>(verts[k]))) ok = false;
            if (!ok) continue;
            color[i] = c;
            go(i + 1);
            color[i] = -1;
        }
    };
    go(0);
    return {out.begin(), out.end()};
}

std::vector<PrimalityTuple> property_b_tuples(const Schema& sc, const ModifiedTD& td,
                                              const std::vector<NodeId>& region, NodeId s) {
    const auto elems = region_elements(td, region);
    const auto& bag = td.td.bags.at(s);
    std::vector<int> atts, fds;  // region attributes and FD indices
    for (auto e : elems) {
        if (sc.is_attribute_elem(e)) atts.push_back(static_cast<int>(e));
        else if (sc.is_fd_elem(e)) fds.push_back(static_cast<int>(e - sc.attribute_count()));
    }
    if (atts.size() > 16) throw CapExceeded("region has more than 16 attributes");
    const auto n = atts.size();
    auto local = [&](int attribute) {
        const auto it = std::find(atts.begin(), atts.end(), attribute);
        return it == atts.end() ? -1 : static_cast<int>(it - atts.begin());
    };
    auto in_bag = [&](ElemId e) { return bag_position(bag, e) >= 0; };

    // per region FD: lhs over local attribute indices, local rhs
    std::vector<std::uint32_t> lhs_in;
    std::vector<bool> lhs_escapes;  // lhs has an attribute outside the region
    std::vector<int> rhs_local;
    for (int f : fds) {
        const auto& dep = sc.fds()[static_cast<std::size_t>(f)];
        std::uint32_t m = 0;
        bool esc = false;
        for (int b : dep.lhs) {
            const int l = local(b);
            if (l < 0) esc = true;
            else m |= 1u << l;
        }
        lhs_in.push_back(m);
        lhs_escapes.push_back(esc);
        rhs_local.push_back(local(dep.rhs));
        if (rhs_local.back() < 0) throw InvalidArgument("region is not FD-bag-closed");
    }
    std::uint32_t in_bag_atts = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (in_bag(static_cast<ElemId>(atts[i]))) in_bag_atts |= 1u << i;

    std::set<PrimalityTuple> out;
    const std::uint32_t all = n == 0 ? 0 : (std::uint32_t{1} << n) - 1;
    for (std::uint32_t yh = 0; yh <= all; ++yh) {
        const std::uint32_t ch = all & ~yh;
        bool closed_ok = true;
        std::uint32_t fy = 0, ybag = 0;
        for (std::size_t i = 0; i < fds.size(); ++i) {
            const bool rhs_out = !(yh >> rhs_local[i] & 1);
            const bool lhs_out = lhs_escapes[i] || (lhs_in[i] & ~yh);
            const auto e = sc.fd_elem(fds[i]);
            if (in_bag(e)) {
                if (rhs_out && (lhs_in[i] & ~yh)) fy |= 1u << bag_position(bag, e);
            } else if (rhs_out && !lhs_out) {
                closed_ok = false;
            }
        }
        if (!closed_ok) continue;
        for (std::size_t i = 0; i < n; ++i)
            if (yh >> i & 1 && in_bag_atts >> i & 1) ybag |= 1u << bag_position(bag, static_cast<ElemId>(atts[i]));

        // choose at most one FD per attribute of C^; exactly one outside the bag
        const auto cl = to_list(ch);
        std::vector<std::vector<int>> options(cl.size());
        for (std::size_t k = 0; k < cl.size(); ++k) {
            if (in_bag_atts >> cl[k] & 1) options[k].push_back(-1);
            for (std::size_t i = 0; i < fds.size(); ++i)
                if (rhs_local[i] == cl[k]) options[k].push_back(static_cast<int>(i));
        }
        std::vector<int> pick(cl.size(), -1);
        std::vector<int> cbag;
        for (int b : cl)
            if (in_bag_atts >> b & 1) cbag.push_back(b);

        std::function<void(std::size_t)> go = [&](std::size_t k) {
            if (k < cl.size()) {
                for (int o : options[k]) {
                    pick[k] = o;
                    go(k + 1);
                }
                return;
            }
            // edges lhs -> rhs among C^
            std::vector<std::uint32_t> pred(n, 0);
            PrimalityTuple base;
            base.y = ybag;
            base.fy = fy;
            for (std::size_t j = 0; j < cl.size(); ++j) {
                if (pick[j] < 0) continue;
                const auto i = static_cast<std::size_t>(pick[j]);
                pred[static_cast<std::size_t>(cl[j])] |= lhs_in[i] & ch;
                const auto e = sc.fd_elem(fds[i]);
                if (in_bag(e)) base.fc |= 1u << bag_position(bag, e);
                if (in_bag_atts >> cl[j] & 1)
                    base.dc |= 1u << bag_position(bag, static_cast<ElemId>(atts[static_cast<std::size_t>(cl[j])]));
            }
            auto order = cbag;
            do {
                auto p = pred;
                for (std::size_t j = 1; j < order.size(); ++j)
                    p[static_cast<std::size_t>(order[j])] |= 1u << order[j - 1];
                // Kahn on the C^ nodes
                std::uint32_t done = 0;
                bool progress = true;
                while (progress) {
                    progress = false;
                    for (auto m = ch & ~done; m; m &= m - 1) {
                        const int v = std::countr_zero(m);
                        if ((p[static_cast<std::size_t>(v)] & ~done) == 0) {
                            done |= 1u << v;
                            progress = true;
                        }
                    }
                }
                if (done != ch) continue;
                PrimalityTuple t = base;
                t.clen = static_cast<std::uint8_t>(order.size());
                for (std::size_t j = 0; j < order.size(); ++j)
                    t.corder |= static_cast<std::uint64_t>(
                                    bag_position(bag, static_cast<ElemId>(atts[static_cast<std::size_t>(order[j])])))
                                << (4 * j);
                out.insert(t);
            } while (std::next_permutation(order.begin(), order.end()));
        };
        go(0);
    }
    return {out.begin(), out.end()};
}

}  // namespace mdtw
