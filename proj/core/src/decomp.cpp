#include "mdtw/decomp.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

#include "mdtw/error.hpp"

namespace mdtw {

// --- TreeDecomposition -----------------------------------------------------

NodeId TreeDecomposition::add_node(std::vector<ElemId> bag) {
    bags.push_back(std::move(bag));
    children.emplace_back();
    parent.push_back(kNoNode);
    const auto id = static_cast<NodeId>(bags.size() - 1);
    if (root == kNoNode) root = id;
    return id;
}

void TreeDecomposition::attach(NodeId parent_node, NodeId child) {
    children[parent_node].push_back(child);
    parent[child] = parent_node;
}

void TreeDecomposition::replace_child(NodeId parent_node, NodeId old_child, NodeId new_child) {
    for (auto& c : children[parent_node])
        if (c == old_child) c = new_child;
    parent[new_child] = parent_node;
    if (parent[old_child] == parent_node) parent[old_child] = kNoNode;
}

int TreeDecomposition::width() const noexcept {
    int w = -1;
    for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
    return w;
}

std::size_t TreeDecomposition::total_bag_size() const noexcept {
    std::size_t n = 0;
    for (const auto& b : bags) n += b.size();
    return n;
}

std::vector<NodeId> TreeDecomposition::preorder() const {
    std::vector<NodeId> out;
    if (root == kNoNode) return out;
    out.reserve(size());
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        const auto n = stack.back();
        stack.pop_back();
        out.push_back(n);
        for (auto it = children[n].rbegin(); it != children[n].rend(); ++it) stack.push_back(*it);
    }
    return out;
}

std::vector<NodeId> TreeDecomposition::postorder() const {
    auto order = preorder();
    // reverse preorder visits children before parents
    std::reverse(order.begin(), order.end());
    return order;
}

std::size_t TreeDecomposition::leaf_count() const {
    std::size_t n = 0;
    for (auto v : preorder())
        if (children[v].empty()) ++n;
    return n;
}

std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Leaf: return "leaf";
        case NodeKind::Intro: return "intro";
        case NodeKind::Remove: return "remove";
        case NodeKind::Branch: return "branch";
        case NodeKind::Copy: return "copy";
    }
    return "?";
}

std::string_view to_string(Def21Kind k) {
    switch (k) {
        case Def21Kind::Leaf: return "leaf";
        case Def21Kind::Permutation: return "permutation";
        case Def21Kind::Replace: return "replace";
        case Def21Kind::Branch: return "branch";
    }
    return "?";
}

std::map<std::string, std::size_t> ModifiedTD::kind_counts() const {
    std::map<std::string, std::size_t> out;
    for (auto k : {NodeKind::Leaf, NodeKind::Intro, NodeKind::Remove, NodeKind::Branch, NodeKind::Copy})
        out[std::string(to_string(k))] = 0;
    for (auto v : td.preorder()) ++out[std::string(to_string(kind[v]))];
    return out;
}

// --- heuristics ------------------------------------------------------------

std::vector<std::vector<ElemId>> gaifman_graph(const TauStructure& a) {
    const auto n = a.domain().size();
    std::vector<std::set<ElemId>> adj(n);
    for (const auto& f : a.facts())
        for (std::size_t i = 0; i < f.args.size(); ++i)
            for (std::size_t j = i + 1; j < f.args.size(); ++j)
                if (f.args[i] != f.args[j]) {
                    adj[f.args[i]].insert(f.args[j]);
                    adj[f.args[j]].insert(f.args[i]);
                }
    std::vector<std::vector<ElemId>> out(n);
    for (std::size_t v = 0; v < n; ++v) out[v].assign(adj[v].begin(), adj[v].end());
    return out;
}

namespace {

// Contract child bags that are subsets of their parent's bag.
TreeDecomposition compact(const TreeDecomposition& in) {
    TreeDecomposition td = in;
    std::vector<bool> dead(td.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId v : td.preorder()) {
            const NodeId p = td.parent[v];
            if (p == kNoNode) continue;
            if (std::includes(td.bags[p].begin(), td.bags[p].end(), td.bags[v].begin(), td.bags[v].end())) {
                auto& pc = td.children[p];
                auto it = std::find(pc.begin(), pc.end(), v);
                const auto kids = td.children[v];
                it = pc.erase(it);
                pc.insert(it, kids.begin(), kids.end());
                for (auto k : kids) td.parent[k] = p;
                td.children[v].clear();
                td.parent[v] = kNoNode;
                dead[v] = true;
                changed = true;
                break;
            }
        }
    }
    // renumber survivors in preorder
    TreeDecomposition out;
    std::vector<NodeId> map(td.size(), kNoNode);
    for (NodeId v : td.preorder()) {
        map[v] = out.add_node(td.bags[v]);
        if (td.parent[v] != kNoNode) out.attach(map[td.parent[v]], map[v]);
    }
    out.root = map[td.root];
    return out;
}

}  // namespace

TreeDecomposition decompose_from_order(const TauStructure& a, std::span<const ElemId> order) {
    const auto n = a.domain().size();
    if (n == 0) throw InvalidArgument("cannot decompose a structure with an empty domain");
    if (order.size() != n) throw InvalidArgument("elimination order must list every element once");
    std::vector<std::size_t> pos(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (order[i] >= n || pos[order[i]] != n) throw InvalidArgument("elimination order is not a permutation");
        pos[order[i]] = i;
    }
    const auto g = gaifman_graph(a);
    std::vector<std::set<ElemId>> adj(n);
    for (std::size_t v = 0; v < n; ++v) adj[v].insert(g[v].begin(), g[v].end());

    TreeDecomposition td;
    std::vector<NodeId> node_of(n, kNoNode);
    std::vector<ElemId> parent_elem(n, static_cast<ElemId>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const ElemId v = order[i];
        std::vector<ElemId> later;
        for (auto u : adj[v])
            if (pos[u] > i) later.push_back(u);
        for (std::size_t x = 0; x < later.size(); ++x)
            for (std::size_t y = x + 1; y < later.size(); ++y) {
                adj[later[x]].insert(later[y]);
                adj[later[y]].insert(later[x]);
            }
        std::vector<ElemId> bag = later;
        bag.push_back(v);
        std::sort(bag.begin(), bag.end());
        node_of[v] = td.add_node(std::move(bag));
        ElemId best = static_cast<ElemId>(n);
        for (auto u : later)
            if (best == n || pos[u] < pos[best]) best = u;
        parent_elem[v] = best;
    }
    // Roots of the elimination forest are chained in elimination order.
    NodeId prev_root = kNoNode;
    for (std::size_t i = n; i-- > 0;) {
        const ElemId v = order[i];
        if (parent_elem[v] == n) {
            if (prev_root == kNoNode) {
                td.root = node_of[v];
            } else {
                td.attach(prev_root, node_of[v]);
            }
            prev_root = node_of[v];
        } else {
            td.attach(node_of[parent_elem[v]], node_of[v]);
        }
    }
    // attach() appended in reverse elimination order; restore id order of children
    for (auto& c : td.children) std::sort(c.begin(), c.end());
    return compact(td);
}

TreeDecomposition heuristic_decompose(const TauStructure& a, Strategy strategy) {
    const auto n = a.domain().size();
    if (n == 0) throw InvalidArgument("cannot decompose a structure with an empty domain");
    const auto g = gaifman_graph(a);
    std::vector<std::set<ElemId>> adj(n);
    for (std::size_t v = 0; v < n; ++v) adj[v].insert(g[v].begin(), g[v].end());
    std::vector<bool> gone(n, false);
    std::vector<ElemId> order;
    order.reserve(n);

    auto fill_in = [&](ElemId v) {
        std::size_t missing = 0;
        for (auto it = adj[v].begin(); it != adj[v].end(); ++it)
            for (auto jt = std::next(it); jt != adj[v].end(); ++jt)
                if (!adj[*it].contains(*jt)) ++missing;
        return missing;
    };

    for (std::size_t step = 0; step < n; ++step) {
        ElemId best = 0;
        std::size_t best_score = std::numeric_limits<std::size_t>::max();
        for (ElemId v = 0; v < n; ++v) {
            if (gone[v]) continue;
            const std::size_t score = strategy == Strategy::MinDegree ? adj[v].size() : fill_in(v);
            if (score < best_score) {
                best_score = score;
                best = v;
            }
        }
        const std::vector<ElemId> nb(adj[best].begin(), adj[best].end());
        for (std::size_t x = 0; x < nb.size(); ++x) {
            adj[nb[x]].erase(best);
            for (std::size_t y = x + 1; y < nb.size(); ++y) {
                adj[nb[x]].insert(nb[y]);
                adj[nb[y]].insert(nb[x]);
            }
        }
        adj[best].clear();
        gone[best] = true;
        order.push_back(best);
    }
    return decompose_from_order(a, order);
}

ExactResult exact_treewidth(const TauStructure& a, std::size_t cap) {
    const auto n = a.domain().size();
    if (n == 0) throw InvalidArgument("cannot decompose a structure with an empty domain");
    if (n > cap || n > 20) throw CapExceeded("exact treewidth limited to " + std::to_string(cap) + " elements");
    const auto g = gaifman_graph(a);
    std::vector<std::uint32_t> nbr(n, 0);
    for (std::size_t v = 0; v < n; ++v)
        for (auto u : g[v]) nbr[v] |= 1u << u;

    // q(S, v): vertices outside S+v reachable from v through S.
    auto q = [&](std::uint32_t s, std::size_t v) {
        std::uint32_t seen = 1u << v, frontier = 1u << v, out = 0;
        while (frontier) {
            const auto x = static_cast<std::size_t>(std::countr_zero(frontier));
            frontier &= frontier - 1;
            const std::uint32_t nx = nbr[x] & ~seen;
            seen |= nx;
            out |= nx & ~s;
            frontier |= nx & s;
        }
        return std::popcount(out);
    };

    const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;
    std::vector<int> tw(std::size_t{1} << n, std::numeric_limits<int>::max());
    std::vector<std::int8_t> last(std::size_t{1} << n, -1);
    tw[0] = -1;
    for (std::uint32_t s = 1; s <= full; ++s) {
        for (std::uint32_t rest = s; rest; rest &= rest - 1) {
            const auto v = static_cast<std::size_t>(std::countr_zero(rest));
            const std::uint32_t prev = s & ~(1u << v);
            const int val = std::max(tw[prev], q(prev, v));
            if (val < tw[s]) {
                tw[s] = val;
                last[s] = static_cast<std::int8_t>(v);
            }
        }
        if (s == full) break;
    }
    std::vector<ElemId> order(n);
    std::uint32_t s = full;
    for (std::size_t i = n; i-- > 0;) {
        order[i] = static_cast<ElemId>(last[s]);
        s &= ~(1u << last[s]);
    }
    ExactResult r;
    r.treewidth = tw[full];
    r.td = decompose_from_order(a, order);
    return r;
}

// --- validation ------------------------------------------------------------

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    if (valid()) {
        out << "valid, width " << width;
        return out.str();
    }
    out << violations.size() << " violation(s):";
    for (const auto& v : violations) out << "\n  " << v.message;
    return out.str();
}

ValidationReport validate(const TauStructure& a, const TreeDecomposition& td) {
    ValidationReport rep;
    auto fail = [&](Violation::Kind k, std::string msg) { rep.violations.push_back({k, std::move(msg)}); };
    const auto n = td.size();
    if (n == 0 || td.root >= n) {
        fail(Violation::Kind::Structure, "decomposition has no root");
        return rep;
    }
    if (td.children.size() != n || td.parent.size() != n) {
        fail(Violation::Kind::Structure, "inconsistent node arrays");
        return rep;
    }
    if (td.parent[td.root] != kNoNode) fail(Violation::Kind::Structure, "root has a parent");
    std::vector<int> seen(n, 0);
    std::vector<NodeId> stack{td.root};
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        if (seen[v]++) {
            fail(Violation::Kind::Structure, "node " + std::to_string(v) + " reached twice (not a tree)");
            return rep;
        }
        for (auto c : td.children[v]) {
            if (c >= n) {
                fail(Violation::Kind::Structure, "child id out of range");
                return rep;
            }
            if (td.parent[c] != v)
                fail(Violation::Kind::Structure, "parent link of node " + std::to_string(c) + " is inconsistent");
            stack.push_back(c);
        }
    }
    for (std::size_t v = 0; v < n; ++v)
        if (!seen[v]) fail(Violation::Kind::Structure, "node " + std::to_string(v) + " unreachable from root");
    if (!rep.valid()) return rep;

    const auto dom = a.domain().size();
    std::vector<std::vector<NodeId>> occ(dom);
    std::vector<std::vector<ElemId>> sorted(n);
    for (std::size_t v = 0; v < n; ++v) {
        sorted[v] = td.bags[v];
        std::sort(sorted[v].begin(), sorted[v].end());
        if (std::adjacent_find(sorted[v].begin(), sorted[v].end()) != sorted[v].end())
            fail(Violation::Kind::Structure, "bag of node " + std::to_string(v) + " repeats an element");
        for (auto e : sorted[v]) {
            if (e >= dom) {
                fail(Violation::Kind::Structure, "bag of node " + std::to_string(v) + " has an element outside the domain");
                continue;
            }
            occ[e].push_back(static_cast<NodeId>(v));
        }
    }
    rep.width = td.width();
    for (std::size_t e = 0; e < dom; ++e)
        if (occ[e].empty()) fail(Violation::Kind::MissingElement, "element " + a.element_name(static_cast<ElemId>(e)) + " occurs in no bag");

    for (const auto& f : a.facts()) {
        if (f.args.empty()) continue;
        std::vector<ElemId> need = f.args;
        std::sort(need.begin(), need.end());
        need.erase(std::unique(need.begin(), need.end()), need.end());
        bool covered = false;
        for (auto v : occ[need.front()])
            if (std::includes(sorted[v].begin(), sorted[v].end(), need.begin(), need.end())) {
                covered = true;
                break;
            }
        if (!covered) {
            std::string msg = "fact " + a.signature()[f.pred].name + "(";
            for (std::size_t i = 0; i < f.args.size(); ++i) msg += (i ? "," : "") + a.element_name(f.args[i]);
            fail(Violation::Kind::UncoveredFact, msg + ") is not covered by any bag");
        }
    }

    for (std::size_t e = 0; e < dom; ++e) {
        std::size_t tops = 0;
        for (auto v : occ[e]) {
            const auto p = td.parent[v];
            if (p == kNoNode || !std::binary_search(sorted[p].begin(), sorted[p].end(), static_cast<ElemId>(e))) ++tops;
        }
        if (tops > 1)
            fail(Violation::Kind::Disconnected,
                 "element " + a.element_name(static_cast<ElemId>(e)) + " occurs in " + std::to_string(tops) +
                     " disconnected parts of the tree");
    }
    return rep;
}

TreeDecomposition reroot(const TreeDecomposition& td, NodeId new_root) {
    if (new_root >= td.size()) throw InvalidArgument("reroot: node id out of range");
    std::vector<std::vector<NodeId>> nb(td.size());
    for (NodeId v = 0; v < td.size(); ++v) {
        if (td.parent[v] != kNoNode) nb[v].push_back(td.parent[v]);
        for (auto c : td.children[v]) nb[v].push_back(c);
    }
    TreeDecomposition out;
    out.bags = td.bags;
    out.children.assign(td.size(), {});
    out.parent.assign(td.size(), kNoNode);
    out.root = new_root;
    std::vector<bool> seen(td.size(), false);
    std::vector<NodeId> stack{new_root};
    seen[new_root] = true;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto u : nb[v])
            if (!seen[u]) {
                seen[u] = true;
                out.attach(v, u);
                stack.push_back(u);
            }
    }
    return out;
}

}  // namespace mdtw
