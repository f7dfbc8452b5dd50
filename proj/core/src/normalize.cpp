#include <algorithm>
#include <deque>
#include <set>

#include "mdtw/decomp.hpp"
#include "mdtw/error.hpp"

namespace mdtw {

namespace {

bool same_set(std::vector<ElemId> a, std::vector<ElemId> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

std::vector<ElemId> set_minus(const std::vector<ElemId>& a, const std::vector<ElemId>& b) {
    std::vector<ElemId> sa = a, sb = b, out;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
    return out;
}

// Preorder renumbering of a modified decomposition.
ModifiedTD renumber(const ModifiedTD& in) {
    ModifiedTD out;
    std::vector<NodeId> map(in.size(), kNoNode);
    out.td.root = kNoNode;
    for (NodeId v : in.td.preorder()) {
        map[v] = out.td.add_node(in.td.bags[v]);
        out.kind.push_back(in.kind[v]);
        out.elem.push_back(in.elem[v]);
        if (in.td.parent[v] != kNoNode) out.td.attach(map[in.td.parent[v]], map[v]);
    }
    out.td.root = map[in.td.root];
    return out;
}

NodeId add_modified(ModifiedTD& m, std::vector<ElemId> bag, NodeKind k, ElemId e = 0) {
    const auto id = m.td.add_node(std::move(bag));
    m.kind.push_back(k);
    m.elem.push_back(e);
    return id;
}

// Merge the child into the parent when both carry the same element set.
TreeDecomposition contract_equal_edges(const TreeDecomposition& in) {
    TreeDecomposition td = in;
    std::vector<NodeId> stack{td.root};
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        bool again = true;
        while (again) {
            again = false;
            auto& kids = td.children[v];
            for (std::size_t i = 0; i < kids.size(); ++i) {
                const auto c = kids[i];
                if (!same_set(td.bags[c], td.bags[v])) continue;
                const auto grand = td.children[c];
                kids.erase(kids.begin() + static_cast<std::ptrdiff_t>(i));
                kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(i), grand.begin(), grand.end());
                for (auto g : grand) td.parent[g] = v;
                td.children[c].clear();
                td.parent[c] = kNoNode;
                again = true;
                break;
            }
        }
        for (auto c : td.children[v]) stack.push_back(c);
    }
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

// --- Def. 2.1 ----------------------------------------------------------------

NormalizedTD normalize_def21(const TreeDecomposition& input, const TauStructure& a) {
    if (input.size() == 0 || input.root == kNoNode) throw InvalidArgument("empty decomposition");
    const int w = input.width();
    if (a.domain().size() < static_cast<std::size_t>(w + 1))
        throw InvalidArgument("domain has fewer than w+1 elements");
    if (w < 0) throw InvalidArgument("decomposition has only empty bags");
    const auto full = static_cast<std::size_t>(w + 1);

    // already in normal form: keep as is
    {
        NormalizedTD same{input, std::vector<Def21Kind>(input.size(), Def21Kind::Leaf), w};
        for (NodeId v = 0; v < input.size(); ++v) {
            const auto& kids = input.children[v];
            if (kids.size() == 2) same.kind[v] = Def21Kind::Branch;
            if (kids.size() == 1)
                same.kind[v] = same_set(input.bags[kids[0]], input.bags[v]) ? Def21Kind::Permutation : Def21Kind::Replace;
        }
        if (def21_violations(same).empty()) return same;
    }

    // (1) pad bags from a full neighbour, breadth-first from a full bag
    TreeDecomposition td = input;
    {
        NodeId start = kNoNode;
        for (auto v : td.preorder())
            if (td.bags[v].size() == full) {
                start = v;
                break;
            }
        std::vector<bool> seen(td.size(), false);
        std::deque<NodeId> queue{start};
        seen[start] = true;
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            std::vector<NodeId> nb = td.children[v];
            if (td.parent[v] != kNoNode) nb.push_back(td.parent[v]);
            for (auto u : nb) {
                if (seen[u]) continue;
                seen[u] = true;
                if (td.bags[u].size() < full) {
                    for (auto e : set_minus(td.bags[v], td.bags[u])) {
                        if (td.bags[u].size() == full) break;
                        td.bags[u].push_back(e);
                    }
                }
                queue.push_back(u);
            }
        }
    }
    td = contract_equal_edges(td);

    // (2) binarize: t1 stays first child, copies take the rest
    for (NodeId v = 0, n = static_cast<NodeId>(td.size()); v < n; ++v) {
        if (td.children[v].size() <= 2) continue;
        const auto kids = td.children[v];
        td.children[v].clear();
        NodeId cur = v;
        for (std::size_t i = 0; i + 2 < kids.size(); ++i) {
            td.attach(cur, kids[i]);
            const auto copy = td.add_node(td.bags[v]);
            td.attach(cur, copy);
            cur = copy;
        }
        td.attach(cur, kids[kids.size() - 2]);
        td.attach(cur, kids.back());
    }

    // (3) copies around branches whose children differ
    for (NodeId v = 0, n = static_cast<NodeId>(td.size()); v < n; ++v) {
        if (td.children[v].size() != 2) continue;
        const auto kids = td.children[v];
        if (same_set(td.bags[kids[0]], td.bags[v]) && same_set(td.bags[kids[1]], td.bags[v])) continue;
        for (auto c : kids) {
            if (same_set(td.bags[c], td.bags[v])) continue;
            const auto copy = td.add_node(td.bags[v]);
            td.replace_child(v, c, copy);
            td.attach(copy, c);
        }
    }

    // (4) interpolate edges that differ in more than one element
    for (NodeId c = 0, n = static_cast<NodeId>(td.size()); c < n; ++c) {
        const auto p = td.parent[c];
        if (p == kNoNode) continue;
        const auto out = set_minus(td.bags[p], td.bags[c]);
        const auto in = set_minus(td.bags[c], td.bags[p]);
        if (out.size() <= 1) continue;
        NodeId cur = p;
        auto bag = td.bags[p];
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            std::replace(bag.begin(), bag.end(), out[i], in[i]);
            const auto mid = td.add_node(bag);
            if (cur == p) {
                td.replace_child(p, c, mid);
            } else {
                td.attach(cur, mid);
            }
            cur = mid;
        }
        td.parent[c] = kNoNode;
        td.attach(cur, c);
    }

    // (5) tuples top-down; position 0 carries the replaced element
    NormalizedTD nt;
    nt.width = w;
    std::vector<std::pair<NodeId, NodeId>> stack;  // (source node, output parent)
    auto emit = [&](std::vector<ElemId> tuple, Def21Kind k, NodeId parent_out) {
        const auto id = nt.td.add_node(std::move(tuple));
        nt.kind.push_back(k);
        if (parent_out != kNoNode) nt.td.attach(parent_out, id);
        return id;
    };
    std::vector<std::vector<ElemId>> tuple(td.size());
    tuple[td.root] = td.bags[td.root];
    stack.emplace_back(td.root, kNoNode);
    while (!stack.empty()) {
        const auto [v, pout] = stack.back();
        stack.pop_back();
        const auto& kids = td.children[v];
        const auto& tv = tuple[v];
        if (kids.empty()) {
            emit(tv, Def21Kind::Leaf, pout);
        } else if (kids.size() == 2) {
            const auto id = emit(tv, Def21Kind::Branch, pout);
            for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
                tuple[*it] = tv;
                stack.emplace_back(*it, id);
            }
        } else {
            const auto c = kids[0];
            const auto out = set_minus(tv, td.bags[c]);
            const auto in = set_minus(td.bags[c], tv);
            if (out.size() != 1 || in.size() != 1) throw InvalidArgument("internal: unexpected bag difference");
            NodeId parent_of_child;
            std::vector<ElemId> tq = tv;
            if (tv[0] == out[0]) {
                parent_of_child = emit(tv, Def21Kind::Replace, pout);
            } else {
                const auto idx = std::find(tq.begin(), tq.end(), out[0]) - tq.begin();
                std::swap(tq[0], tq[static_cast<std::size_t>(idx)]);
                const auto perm = emit(tv, Def21Kind::Permutation, pout);
                parent_of_child = emit(tq, Def21Kind::Replace, perm);
            }
            tq[0] = in[0];
            tuple[c] = td.bags[c];
            if (tq != tuple[c]) parent_of_child = emit(tq, Def21Kind::Permutation, parent_of_child);
            stack.emplace_back(c, parent_of_child);
        }
    }
    nt.td.root = 0;
    return nt;
}

std::vector<std::string> def21_violations(const NormalizedTD& nt) {
    std::vector<std::string> out;
    const auto& td = nt.td;
    const auto full = static_cast<std::size_t>(nt.width + 1);
    for (NodeId v = 0; v < td.size(); ++v) {
        const auto& t = td.bags[v];
        const std::string name = "node " + std::to_string(v);
        if (t.size() != full) out.push_back(name + ": tuple size differs from w+1");
        std::vector<ElemId> s = t;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) out.push_back(name + ": repeated element");
        const auto& kids = td.children[v];
        const auto kind = v < nt.kind.size() ? nt.kind[v] : Def21Kind::Leaf;
        if (kids.empty()) {
            if (kind != Def21Kind::Leaf) out.push_back(name + ": leaf mislabelled");
        } else if (kids.size() == 2) {
            if (td.bags[kids[0]] != t || td.bags[kids[1]] != t) out.push_back(name + ": branch children differ");
            if (kind != Def21Kind::Branch) out.push_back(name + ": branch mislabelled");
        } else if (kids.size() == 1) {
            const auto& c = td.bags[kids[0]];
            if (same_set(c, t)) {
                if (kind != Def21Kind::Permutation) out.push_back(name + ": permutation mislabelled");
            } else {
                bool ok = c.size() == t.size() && !c.empty() && c[0] != t[0] &&
                          std::find(t.begin(), t.end(), c[0]) == t.end();
                for (std::size_t i = 1; ok && i < t.size(); ++i) ok = c[i] == t[i];
                if (!ok) out.push_back(name + ": child is neither a permutation nor a position-0 replacement");
                if (kind != Def21Kind::Replace) out.push_back(name + ": replacement mislabelled");
            }
        } else {
            out.push_back(name + ": more than two children");
        }
    }
    return out;
}

// --- modified normal form --------------------------------------------------

ModifiedTD classify_modified(TreeDecomposition td) {
    for (auto& b : td.bags) std::sort(b.begin(), b.end());
    ModifiedTD m;
    m.kind.assign(td.size(), NodeKind::Leaf);
    m.elem.assign(td.size(), 0);
    for (NodeId v = 0; v < td.size(); ++v) {
        const auto& kids = td.children[v];
        const auto& b = td.bags[v];
        if (kids.empty()) continue;
        if (kids.size() == 2) {
            if (td.bags[kids[0]] != b || td.bags[kids[1]] != b)
                throw InvalidArgument("node " + std::to_string(v) + ": branch children differ from the branch bag");
            m.kind[v] = NodeKind::Branch;
            continue;
        }
        if (kids.size() > 2) throw InvalidArgument("node " + std::to_string(v) + " has more than two children");
        const auto& c = td.bags[kids[0]];
        const auto plus = set_minus(b, c), minus = set_minus(c, b);
        if (plus.empty() && minus.empty()) {
            m.kind[v] = NodeKind::Copy;
        } else if (plus.size() == 1 && minus.empty()) {
            m.kind[v] = NodeKind::Intro;
            m.elem[v] = plus[0];
        } else if (minus.size() == 1 && plus.empty()) {
            m.kind[v] = NodeKind::Remove;
            m.elem[v] = minus[0];
        } else {
            throw InvalidArgument("node " + std::to_string(v) + " differs from its child by more than one element");
        }
    }
    m.td = std::move(td);
    return m;
}

ModifiedTD normalize_modified(const TreeDecomposition& input) {
    if (input.size() == 0 || input.root == kNoNode) throw InvalidArgument("empty decomposition");
    std::vector<std::vector<ElemId>> bags = input.bags;
    for (auto& b : bags) std::sort(b.begin(), b.end());
    ModifiedTD m;
    std::vector<NodeId> top(input.size(), kNoNode);
    for (NodeId v : input.postorder()) {
        std::vector<NodeId> tops;
        for (auto c : input.children[v]) {
            NodeId cur = top[c];
            auto bag = bags[c];
            auto removed = set_minus(bags[c], bags[v]);
            std::sort(removed.rbegin(), removed.rend());
            for (auto e : removed) {
                bag.erase(std::find(bag.begin(), bag.end(), e));
                const auto id = add_modified(m, bag, NodeKind::Remove, e);
                m.td.attach(id, cur);
                cur = id;
            }
            for (auto e : set_minus(bags[v], bags[c])) {
                bag.insert(std::upper_bound(bag.begin(), bag.end(), e), e);
                const auto id = add_modified(m, bag, NodeKind::Intro, e);
                m.td.attach(id, cur);
                cur = id;
            }
            tops.push_back(cur);
        }
        if (tops.empty()) {
            top[v] = add_modified(m, bags[v], NodeKind::Leaf);
        } else {
            NodeId cur = tops[0];
            for (std::size_t i = 1; i < tops.size(); ++i) {
                const auto id = add_modified(m, bags[v], NodeKind::Branch);
                m.td.attach(id, cur);
                m.td.attach(id, tops[i]);
                cur = id;
            }
            top[v] = cur;
        }
    }
    m.td.root = top[input.root];
    return renumber(m);
}

bool is_fd_bag_closed(const ModifiedTD& m, const Schema& s) {
    for (const auto& bag : m.td.bags)
        for (auto e : bag)
            if (s.is_fd_elem(e)) {
                const auto rhs = s.attribute_elem(s.fds()[e - s.attribute_count()].rhs);
                if (!std::binary_search(bag.begin(), bag.end(), rhs)) return false;
            }
    return true;
}

ModifiedTD enforce_fd_bag_closure(const ModifiedTD& m, const Schema& s) {
    if (is_fd_bag_closed(m, s)) return m;
    TreeDecomposition td = m.td;
    const auto n = td.size();
    std::vector<bool> touched(s.attribute_count(), false);
    for (auto& bag : td.bags) {
        std::vector<ElemId> extra;
        for (auto e : bag)
            if (s.is_fd_elem(e)) extra.push_back(s.attribute_elem(s.fds()[e - s.attribute_count()].rhs));
        for (auto b : extra) touched[b] = true;
        bag.insert(bag.end(), extra.begin(), extra.end());
        std::sort(bag.begin(), bag.end());
        bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
    }
    // connectedness repair: fill the Steiner subtree of every touched attribute
    const auto post = td.postorder();
    for (ElemId b = 0; b < touched.size(); ++b) {
        if (!touched[b]) continue;
        std::vector<std::size_t> cnt(n, 0);
        std::vector<std::size_t> branches(n, 0);
        for (auto v : post) {
            if (std::binary_search(td.bags[v].begin(), td.bags[v].end(), b)) ++cnt[v];
            for (auto c : td.children[v])
                if (cnt[c] > 0) {
                    cnt[v] += cnt[c];
                    ++branches[v];
                }
        }
        const auto total = cnt[td.root];
        for (NodeId v = 0; v < n; ++v) {
            const bool has = std::binary_search(td.bags[v].begin(), td.bags[v].end(), b);
            if (!has && cnt[v] > 0 && (cnt[v] < total || branches[v] >= 2)) {
                td.bags[v].insert(std::upper_bound(td.bags[v].begin(), td.bags[v].end(), b), b);
            }
        }
    }
    return normalize_modified(td);
}

ModifiedTD prepare_enumeration(const ModifiedTD& in, std::span<const ElemId> required) {
    ModifiedTD m = in;
    std::set<ElemId> in_leaf;
    for (NodeId v = 0; v < m.size(); ++v)
        if (m.td.children[v].empty()) in_leaf.insert(m.td.bags[v].begin(), m.td.bags[v].end());

    auto hang = [&](NodeId t, NodeId fresh) {
        const auto p = m.td.parent[t];
        if (p == kNoNode) {
            m.td.root = fresh;
        } else {
            m.td.replace_child(p, t, fresh);
        }
        m.td.parent[t] = kNoNode;
        m.td.attach(fresh, t);
    };

    std::vector<ElemId> req(required.begin(), required.end());
    std::sort(req.begin(), req.end());
    for (auto e : req) {
        if (in_leaf.contains(e)) continue;
        NodeId host = kNoNode;
        for (auto v : m.td.preorder())
            if (std::binary_search(m.td.bags[v].begin(), m.td.bags[v].end(), e)) {
                host = v;
                break;
            }
        if (host == kNoNode) continue;
        const auto bag = m.td.bags[host];
        const auto branch = add_modified(m, bag, NodeKind::Branch);
        hang(host, branch);
        const auto leaf = add_modified(m, bag, NodeKind::Leaf);
        m.td.attach(branch, leaf);
        in_leaf.insert(bag.begin(), bag.end());
    }
    for (NodeId v = 0, n = static_cast<NodeId>(m.size()); v < n; ++v) {
        if (m.kind[v] != NodeKind::Branch) continue;
        const auto p = m.td.parent[v];
        if (p != kNoNode && m.td.bags[p] == m.td.bags[v]) continue;
        const auto copy = add_modified(m, m.td.bags[v], NodeKind::Copy);
        hang(v, copy);
    }
    return renumber(m);
}

ModifiedTD prepare_enumeration(const ModifiedTD& td, const Schema& s) {
    std::vector<ElemId> atts;
    for (std::size_t i = 0; i < s.attribute_count(); ++i) atts.push_back(s.attribute_elem(static_cast<int>(i)));
    return prepare_enumeration(td, atts);
}

bool is_enumeration_ready(const ModifiedTD& m, std::span<const ElemId> required) {
    std::set<ElemId> in_leaf;
    for (NodeId v = 0; v < m.size(); ++v)
        if (m.td.children[v].empty()) in_leaf.insert(m.td.bags[v].begin(), m.td.bags[v].end());
    for (auto e : required)
        if (!in_leaf.contains(e)) return false;
    for (NodeId v = 0; v < m.size(); ++v) {
        if (m.kind[v] != NodeKind::Branch) continue;
        const auto p = m.td.parent[v];
        if (p == kNoNode || m.td.bags[p] != m.td.bags[v]) return false;
    }
    return true;
}

}  // namespace mdtw
