#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "mdtw/error.hpp"
#include "mdtw/solvers.hpp"

namespace mdtw {

std::vector<int> PrimalityTuple::c_order() const {
    std::vector<int> out;
    for (int i = 0; i < clen; ++i) out.push_back(static_cast<int>(corder >> (4 * i) & 0xF));
    return out;
}

std::uint32_t PrimalityTuple::c_mask() const {
    std::uint32_t m = 0;
    for (int i = 0; i < clen; ++i) m |= 1u << (corder >> (4 * i) & 0xF);
    return m;
}

std::size_t PrimalityTupleHash::operator()(const PrimalityTuple& t) const noexcept {
    std::uint64_t h = t.corder * 0x9E3779B97F4A7C15ull;
    h ^= (static_cast<std::uint64_t>(t.y) << 32 | t.fy) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    h ^= (static_cast<std::uint64_t>(t.dc) << 32 | t.fc) + 0x94D049BB133111EBull + (h << 6) + (h >> 2);
    h ^= t.clen;
    return static_cast<std::size_t>(h);
}

namespace {

std::string elem_name(ElemId e, const Schema& s) {
    if (s.is_attribute_elem(e)) return s.attribute_name(static_cast<int>(e));
    return s.fds().at(e - s.attribute_count()).id;
}

}  // namespace

std::string to_string(const PrimalityTuple& t, const std::vector<ElemId>& bag, const Schema& s) {
    auto set = [&](std::uint32_t m) {
        std::string out = "{";
        bool first = true;
        for (std::size_t i = 0; i < bag.size(); ++i)
            if (m >> i & 1) {
                if (!first) out += ",";
                out += elem_name(bag[i], s);
                first = false;
            }
        return out + "}";
    };
    std::string c = "(";
    const auto ord = t.c_order();
    for (std::size_t i = 0; i < ord.size(); ++i) {
        if (i) c += ",";
        c += elem_name(bag[static_cast<std::size_t>(ord[i])], s);
    }
    c += ")";
    return "Y=" + set(t.y) + " FY=" + set(t.fy) + " C=" + c + " dC=" + set(t.dc) + " FC=" + set(t.fc);
}

std::vector<int> outside(const std::vector<int>& y, const std::vector<int>& at, const std::vector<int>& fd,
                         const Schema& s) {
    std::vector<int> out;
    auto in = [](const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); };
    for (int f : fd) {
        const auto& dep = s.fds().at(static_cast<std::size_t>(f));
        if (in(y, dep.rhs)) continue;
        bool escapes = false;
        for (int b : dep.lhs)
            if (in(at, b) && !in(y, b)) escapes = true;
        if (escapes) out.push_back(f);
    }
    return out;
}

bool consistent(const std::vector<int>& fc, const std::vector<int>& c_ord, const Schema& s) {
    auto rank = [&](int b) {
        const auto it = std::find(c_ord.begin(), c_ord.end(), b);
        return it == c_ord.end() ? -1 : static_cast<int>(it - c_ord.begin());
    };
    for (int f : fc) {
        const auto& dep = s.fds().at(static_cast<std::size_t>(f));
        const int r = rank(dep.rhs);
        if (r < 0) return false;
        for (int b : dep.lhs) {
            const int k = rank(b);
            if (k >= 0 && k >= r) return false;
        }
    }
    return true;
}

bool unique(const std::vector<int>& dc1, const std::vector<int>& dc2, const std::vector<int>& fc, const Schema& s) {
    std::vector<int> a(dc1), b(dc2), both, rhs;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    for (int f : fc) rhs.push_back(s.fds().at(static_cast<std::size_t>(f)).rhs);
    std::sort(rhs.begin(), rhs.end());
    rhs.erase(std::unique(rhs.begin(), rhs.end()), rhs.end());
    return both == rhs;
}

namespace {

constexpr std::size_t kMaxBag = 16;

/// Position-level view of one bag.
struct BagInfo {
    std::vector<ElemId> elems;
    std::uint32_t atts = 0;  // attribute positions
    std::uint32_t fds = 0;   // FD positions
    std::vector<int> rhs;    // per FD position: rhs position
    std::vector<std::uint32_t> lhs;  // per FD position: lhs positions inside the bag

    BagInfo(const std::vector<ElemId>& bag, const Schema& s) : elems(bag), rhs(bag.size(), -1), lhs(bag.size(), 0) {
        if (bag.size() > kMaxBag) throw InvalidArgument("bag of " + std::to_string(bag.size()) +
                                                        " elements exceeds the supported maximum of 16");
        auto pos = [&](ElemId e) {
            const auto it = std::lower_bound(bag.begin(), bag.end(), e);
            return it != bag.end() && *it == e ? static_cast<int>(it - bag.begin()) : -1;
        };
        for (std::size_t i = 0; i < bag.size(); ++i) {
            const auto e = bag[i];
            if (s.is_attribute_elem(e)) {
                atts |= 1u << i;
            } else if (s.is_fd_elem(e)) {
                fds |= 1u << i;
                const auto& dep = s.fds()[e - s.attribute_count()];
                rhs[i] = pos(s.attribute_elem(dep.rhs));
                if (rhs[i] < 0)
                    throw InvalidArgument("decomposition is not FD-bag-closed: " + dep.id + " without its rhs " +
                                          s.attribute_name(dep.rhs));
                for (int b : dep.lhs)
                    if (const int p = pos(s.attribute_elem(b)); p >= 0) lhs[i] |= 1u << p;
            } else {
                throw InvalidArgument("bag element " + std::to_string(e) + " is not part of the schema");
            }
        }
    }

    std::uint32_t outside(std::uint32_t y, std::uint32_t at, std::uint32_t fd) const {
        std::uint32_t out = 0;
        for (auto m = fd; m; m &= m - 1) {
            const int f = std::countr_zero(m);
            if (y >> rhs[static_cast<std::size_t>(f)] & 1) continue;
            if (lhs[static_cast<std::size_t>(f)] & at & ~y) out |= 1u << f;
        }
        return out;
    }

    std::uint32_t rhs_mask(std::uint32_t fd) const {
        std::uint32_t out = 0;
        for (auto m = fd; m; m &= m - 1) out |= 1u << rhs[static_cast<std::size_t>(std::countr_zero(m))];
        return out;
    }

    bool consistent(std::uint32_t fc, const PrimalityTuple& t) const {
        int rank[kMaxBag];
        std::fill(std::begin(rank), std::end(rank), -1);
        for (int i = 0; i < t.clen; ++i) rank[t.corder >> (4 * i) & 0xF] = i;
        for (auto m = fc; m; m &= m - 1) {
            const int f = std::countr_zero(m);
            const int r = rank[rhs[static_cast<std::size_t>(f)]];
            if (r < 0) return false;
            for (auto l = lhs[static_cast<std::size_t>(f)]; l; l &= l - 1) {
                const int k = rank[std::countr_zero(l)];
                if (k >= r) return false;
            }
        }
        return true;
    }
};

std::uint32_t expand(std::uint32_t m, int p) {
    const std::uint32_t low = m & ((1u << p) - 1);
    return low | ((m >> p) << (p + 1));
}

std::uint32_t shrink(std::uint32_t m, int p) {
    const std::uint32_t low = m & ((1u << p) - 1);
    return low | ((m >> (p + 1)) << p);
}

PrimalityTuple expand(const PrimalityTuple& t, int p) {
    PrimalityTuple o{expand(t.y, p), expand(t.fy, p), expand(t.dc, p), expand(t.fc, p), 0, t.clen};
    for (int i = 0; i < t.clen; ++i) {
        auto e = t.corder >> (4 * i) & 0xF;
        if (static_cast<int>(e) >= p) ++e;
        o.corder |= e << (4 * i);
    }
    return o;
}

/// Drops position p (and its C° entry, if any).
PrimalityTuple shrink(const PrimalityTuple& t, int p) {
    PrimalityTuple o{shrink(t.y, p), shrink(t.fy, p), shrink(t.dc, p), shrink(t.fc, p), 0, 0};
    for (int i = 0; i < t.clen; ++i) {
        auto e = t.corder >> (4 * i) & 0xF;
        if (static_cast<int>(e) == p) continue;
        if (static_cast<int>(e) > p) --e;
        o.corder |= e << (4 * o.clen);
        ++o.clen;
    }
    return o;
}

PrimalityTuple insert_c(const PrimalityTuple& t, int k, int p) {
    PrimalityTuple o = t;
    const std::uint64_t low = k == 0 ? 0 : t.corder & ((std::uint64_t{1} << (4 * k)) - 1);
    const std::uint64_t high = k >= 16 ? 0 : t.corder >> (4 * k);
    o.corder = low | (static_cast<std::uint64_t>(p) << (4 * k)) | (k + 1 >= 16 ? 0 : high << (4 * (k + 1)));
    ++o.clen;
    return o;
}

using Set = std::unordered_set<PrimalityTuple, PrimalityTupleHash>;

std::vector<PrimalityTuple> finish(Set&& set) {
    std::vector<PrimalityTuple> out(set.begin(), set.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PrimalityTuple> leaf_rule(const BagInfo& bi) {
    Set out;
    const auto at = bi.atts;
    std::vector<int> fd_pos;
    for (auto m = bi.fds; m; m &= m - 1) fd_pos.push_back(std::countr_zero(m));
    // y ranges over subsets of at
    for (std::uint32_t y = at;; y = (y - 1) & at) {
        const std::uint32_t c = at & ~y;
        std::vector<int> order;
        for (auto m = c; m; m &= m - 1) order.push_back(std::countr_zero(m));
        const auto fy = bi.outside(y, at, bi.fds);
        do {
            PrimalityTuple base{y, fy, 0, 0, 0, static_cast<std::uint8_t>(order.size())};
            for (std::size_t i = 0; i < order.size(); ++i)
                base.corder |= static_cast<std::uint64_t>(order[i]) << (4 * i);
            std::vector<int> usable;
            for (int f : fd_pos)
                if (bi.consistent(1u << f, base)) usable.push_back(f);
            const auto n = usable.size();
            for (std::uint32_t sub = 0; sub < (1u << n); ++sub) {
                PrimalityTuple t = base;
                bool ok = true;
                for (std::size_t i = 0; i < n && ok; ++i) {
                    if (!(sub >> i & 1)) continue;
                    const int f = usable[i];
                    const auto r = 1u << bi.rhs[static_cast<std::size_t>(f)];
                    if (t.dc & r) ok = false;
                    t.dc |= r;
                    t.fc |= 1u << f;
                }
                if (ok) out.insert(t);
            }
        } while (std::next_permutation(order.begin(), order.end()));
        if (y == 0) break;
    }
    return finish(std::move(out));
}

int position_of(const std::vector<ElemId>& bag, ElemId e) {
    const auto it = std::lower_bound(bag.begin(), bag.end(), e);
    return it != bag.end() && *it == e ? static_cast<int>(it - bag.begin()) : -1;
}

/// `to` = `from` plus one element.
std::vector<PrimalityTuple> intro_rule(const std::vector<PrimalityTuple>& in, const BagInfo& to, int p) {
    Set out;
    const auto bit = 1u << p;
    if (to.atts & bit) {
        for (const auto& c : in) {
            const auto t = expand(c, p);
            auto y = t;
            y.y |= bit;
            out.insert(y);
            for (int k = 0; k <= t.clen; ++k) {
                auto n = insert_c(t, k, p);
                if (!to.consistent(n.fc, n)) continue;
                n.fy |= to.outside(n.y, to.atts, to.fds);
                out.insert(n);
            }
        }
    } else {
        const auto r = 1u << to.rhs[static_cast<std::size_t>(p)];
        for (const auto& c : in) {
            auto t = expand(c, p);
            if (t.y & r) {
                out.insert(t);
                continue;
            }
            t.fy |= to.outside(t.y, to.atts, bit);
            out.insert(t);
            if (!(t.dc & r) && to.consistent(bit, t)) {
                t.dc |= r;
                t.fc |= bit;
                out.insert(t);
            }
        }
    }
    return finish(std::move(out));
}

/// `to` = `from` minus the element at position p of `from`.
std::vector<PrimalityTuple> remove_rule(const std::vector<PrimalityTuple>& in, const BagInfo& from, int p) {
    Set out;
    const auto bit = 1u << p;
    if (from.atts & bit) {
        for (const auto& t : in) {
            if (!(t.y & bit) && !(t.dc & bit)) continue;
            out.insert(shrink(t, p));
        }
    } else {
        const auto r = 1u << from.rhs[static_cast<std::size_t>(p)];
        for (const auto& t : in) {
            if (!(t.y & r) && !(t.fy & bit)) continue;
            out.insert(shrink(t, p));
        }
    }
    return finish(std::move(out));
}

struct JoinKey {
    std::uint32_t y, fc;
    std::uint64_t corder;
    std::uint8_t clen;
    bool operator==(const JoinKey&) const = default;
};
struct JoinKeyHash {
    std::size_t operator()(const JoinKey& k) const noexcept {
        return PrimalityTupleHash{}(PrimalityTuple{k.y, 0, 0, k.fc, k.corder, k.clen});
    }
};

std::vector<PrimalityTuple> join_rule(const std::vector<PrimalityTuple>& a, const std::vector<PrimalityTuple>& b,
                                      const BagInfo& bi) {
    std::unordered_map<JoinKey, std::vector<const PrimalityTuple*>, JoinKeyHash> index;
    for (const auto& t : b) index[{t.y, t.fc, t.corder, t.clen}].push_back(&t);
    Set out;
    for (const auto& t : a) {
        const auto it = index.find({t.y, t.fc, t.corder, t.clen});
        if (it == index.end()) continue;
        const auto need = bi.rhs_mask(t.fc);
        for (const auto* u : it->second) {
            if ((t.dc & u->dc) != need) continue;
            out.insert({t.y, t.fy | u->fy, t.dc | u->dc, t.fc, t.corder, t.clen});
        }
    }
    return finish(std::move(out));
}

/// Moves a table across one tree edge by the bag difference.
std::vector<PrimalityTuple> transfer(const std::vector<PrimalityTuple>& in, const std::vector<ElemId>& from,
                                     const std::vector<ElemId>& to, const Schema& s) {
    if (from == to) return in;
    if (to.size() == from.size() + 1) {
        for (std::size_t i = 0; i < to.size(); ++i)
            if (i == from.size() || from[i] != to[i]) {
                auto check = to;
                check.erase(check.begin() + static_cast<std::ptrdiff_t>(i));
                if (check != from) break;
                return intro_rule(in, BagInfo(to, s), static_cast<int>(i));
            }
    } else if (from.size() == to.size() + 1) {
        for (std::size_t i = 0; i < from.size(); ++i)
            if (i == to.size() || from[i] != to[i]) {
                auto check = from;
                check.erase(check.begin() + static_cast<std::ptrdiff_t>(i));
                if (check != to) break;
                return remove_rule(in, BagInfo(from, s), static_cast<int>(i));
            }
    }
    throw InvalidArgument("adjacent bags differ by more than one element");
}

void visit(PassStats* stats, NodeId v, std::size_t n, std::size_t cells) {
    if (!stats) return;
    if (stats->visits.size() < n) stats->visits.resize(n, 0);
    if (stats->node_cells.size() < n) stats->node_cells.resize(n, 0);
    ++stats->visits[v];
    stats->node_cells[v] += cells;
    stats->cells += cells;
}

void check_schema_td(const Schema& s, const ModifiedTD& m) {
    if (m.size() == 0 || m.td.root == kNoNode) throw InvalidArgument("empty decomposition");
    for (const auto& bag : m.td.bags) {
        if (!std::is_sorted(bag.begin(), bag.end())) throw InvalidArgument("bags must be sorted");
        BagInfo(bag, s);
    }
}

}  // namespace

PrimalityTable primality_solve_up(const Schema& s, const ModifiedTD& m, PassStats* stats) {
    check_schema_td(s, m);
    const auto& td = m.td;
    PrimalityTable tab;
    tab.at.assign(td.size(), {});
    for (NodeId v : td.postorder()) {
        const auto& kids = td.children[v];
        auto& out = tab.at[v];
        if (kids.empty()) {
            out = leaf_rule(BagInfo(td.bags[v], s));
        } else if (kids.size() == 2) {
            if (td.bags[kids[0]] != td.bags[v] || td.bags[kids[1]] != td.bags[v])
                throw InvalidArgument("branch node with differing child bags");
            out = join_rule(tab.at[kids[0]], tab.at[kids[1]], BagInfo(td.bags[v], s));
        } else if (kids.size() == 1) {
            out = transfer(tab.at[kids[0]], td.bags[kids[0]], td.bags[v], s);
        } else {
            throw InvalidArgument("node with more than two children");
        }
        visit(stats, v, td.size(), out.size());
    }
    return tab;
}

PrimalityTable primality_solve_down(const Schema& s, const ModifiedTD& m, const PrimalityTable& up,
                                    PassStats* stats) {
    const auto& td = m.td;
    if (up.at.size() != td.size() || up.down) throw InvalidArgument("up table missing");
    PrimalityTable tab;
    tab.down = true;
    tab.at.assign(td.size(), {});
    for (NodeId v : td.preorder()) {
        const auto p = td.parent[v];
        auto& out = tab.at[v];
        if (p == kNoNode) {
            out = leaf_rule(BagInfo(td.bags[v], s));
        } else if (td.children[p].size() == 2) {
            const auto sib = td.children[p][0] == v ? td.children[p][1] : td.children[p][0];
            const auto joined = join_rule(tab.at[p], up.at[sib], BagInfo(td.bags[p], s));
            out = transfer(joined, td.bags[p], td.bags[v], s);
        } else {
            out = transfer(tab.at[p], td.bags[p], td.bags[v], s);
        }
        visit(stats, v, td.size(), out.size());
    }
    return tab;
}

bool primality_success(const PrimalityTuple& t, const std::vector<ElemId>& bag, const Schema& s, int pos) {
    const BagInfo bi(bag, s);
    const auto a = 1u << pos;
    if (t.y & a) return false;
    std::uint32_t want_fy = 0;
    for (auto m = bi.fds; m; m &= m - 1) {
        const int f = std::countr_zero(m);
        if (!(t.y >> bi.rhs[static_cast<std::size_t>(f)] & 1)) want_fy |= 1u << f;
    }
    return t.fy == want_fy && t.dc == (t.c_mask() & ~a);
}

namespace {

int attribute_position(const Schema& s, const std::vector<ElemId>& bag, int attribute) {
    if (attribute < 0 || static_cast<std::size_t>(attribute) >= s.attribute_count())
        throw InvalidArgument("attribute index " + std::to_string(attribute) + " is not in the schema");
    return position_of(bag, s.attribute_elem(attribute));
}

bool any_success(const std::vector<PrimalityTuple>& table, const std::vector<ElemId>& bag, const Schema& s,
                 int pos) {
    const BagInfo bi(bag, s);
    const auto a = 1u << pos;
    return std::any_of(table.begin(), table.end(), [&](const PrimalityTuple& t) {
        if (t.y & a) return false;
        std::uint32_t want_fy = 0;
        for (auto m = bi.fds; m; m &= m - 1) {
            const int f = std::countr_zero(m);
            if (!(t.y >> bi.rhs[static_cast<std::size_t>(f)] & 1)) want_fy |= 1u << f;
        }
        return t.fy == want_fy && t.dc == (t.c_mask() & ~a);
    });
}

}  // namespace

bool primality_decide(const Schema& s, const ModifiedTD& m, int attribute, PassStats* stats) {
    int pos = attribute_position(s, m.td.bags.at(m.td.root), attribute);
    if (pos >= 0) {
        const auto up = primality_solve_up(s, m, stats);
        return any_success(up.at[m.td.root], m.td.bags[m.td.root], s, pos);
    }
    NodeId host = kNoNode;
    for (auto v : m.td.preorder())
        if (position_of(m.td.bags[v], s.attribute_elem(attribute)) >= 0) {
            host = v;
            break;
        }
    if (host == kNoNode) throw InvalidArgument("attribute " + s.attribute_name(attribute) + " occurs in no bag");
    const auto re = normalize_modified(reroot(m.td, host));
    pos = attribute_position(s, re.td.bags[re.td.root], attribute);
    const auto up = primality_solve_up(s, re, stats);
    return any_success(up.at[re.td.root], re.td.bags[re.td.root], s, pos);
}

bool primality_at_node(const Schema& s, const ModifiedTD& m, const PrimalityTable& up, const PrimalityTable& down,
                       NodeId node, int attribute) {
    const auto& bag = m.td.bags.at(node);
    const int pos = attribute_position(s, bag, attribute);
    if (pos < 0) throw InvalidArgument("attribute is not in the bag of node " + std::to_string(node));
    return any_success(join_rule(up.at.at(node), down.at.at(node), BagInfo(bag, s)), bag, s, pos);
}

std::vector<int> enumerate_primes(const Schema& s, const ModifiedTD& m, PassStats* stats) {
    std::vector<ElemId> atts(s.attribute_count());
    std::iota(atts.begin(), atts.end(), ElemId{0});
    if (!is_fd_bag_closed(m, s)) throw InvalidArgument("decomposition is not FD-bag-closed");
    if (!is_enumeration_ready(m, atts)) throw InvalidArgument("decomposition is not enumeration-ready");
    const auto up = primality_solve_up(s, m, stats);
    const auto down = primality_solve_down(s, m, up, stats);
    std::vector<bool> prime(s.attribute_count(), false);
    for (NodeId v = 0; v < m.size(); ++v) {
        if (!m.td.children[v].empty()) continue;
        const auto& bag = m.td.bags[v];
        for (std::size_t i = 0; i < bag.size(); ++i)
            if (s.is_attribute_elem(bag[i]) && !prime[bag[i]] &&
                any_success(down.at[v], bag, s, static_cast<int>(i)))
                prime[bag[i]] = true;
        visit(stats, v, m.size(), 0);
    }
    std::vector<int> out;
    for (std::size_t a = 0; a < prime.size(); ++a)
        if (prime[a]) out.push_back(static_cast<int>(a));
    return out;
}

ModifiedTD primality_ready(const Schema& s, const TreeDecomposition& td) {
    return prepare_enumeration(enforce_fd_bag_closure(normalize_modified(td), s), s);
}

double primality_table_bound(std::size_t n_att, std::size_t n_fd) {
    // ordered subsets of the attributes for C°, times free choices of dC, FY, FC
    double arrangements = 0;
    double term = 1;
    for (std::size_t j = 0; j <= n_att; ++j) {
        arrangements += term;
        term *= static_cast<double>(n_att - j);
    }
    return arrangements * std::ldexp(1.0, static_cast<int>(n_att + 2 * n_fd));
}

}  // namespace mdtw
