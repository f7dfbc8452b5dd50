#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mdtw/decomp.hpp"
#include "mdtw/engine.hpp"
#include "mdtw/structures.hpp"

namespace mdtw {

template <class T>
struct NodeTable {
    std::vector<std::vector<T>> at;  // indexed by node id
    bool down = false;

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& t : at) n += t.size();
        return n;
    }
    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> out;
        for (const auto& t : at) out.push_back(t.size());
        return out;
    }
};

// --- 3-Colorability ----------------------------------------------------------

/// Bitmasks over bag positions.
struct ColorTuple {
    std::uint32_t r = 0, g = 0, b = 0;

    auto operator<=>(const ColorTuple&) const = default;
};

/// True iff no edge joins two vertices of the bag subset x.
bool allowed(std::uint32_t x, const std::vector<ElemId>& bag, const Graph& g);

NodeTable<ColorTuple> three_col_solve_up(const Graph& g, const ModifiedTD& td);
bool three_col_decide(const Graph& g, const ModifiedTD& td);

/// The coloring program over tau_td for a Def. 2.1 decomposition of width w.
std::string three_col_program(int width);
bool three_col_via_engine(const Graph& g, const NormalizedTD& td, EvalStats* stats = nullptr);

// --- PRIMALITY ---------------------------------------------------------------

/// Subsets are bitmasks over bag positions; C° is a sequence of bag positions
/// packed 4 bits each (bags of up to 16 elements).
struct PrimalityTuple {
    std::uint32_t y = 0;
    std::uint32_t fy = 0;
    std::uint32_t dc = 0;
    std::uint32_t fc = 0;
    std::uint64_t corder = 0;
    std::uint8_t clen = 0;

    std::vector<int> c_order() const;
    std::uint32_t c_mask() const;
    auto operator<=>(const PrimalityTuple&) const = default;
};

struct PrimalityTupleHash {
    std::size_t operator()(const PrimalityTuple& t) const noexcept;
};

/// Human-readable form, e.g. `Y={a} FY={} C=(b,c) dC={c} FC={f1}`.
std::string to_string(const PrimalityTuple& t, const std::vector<ElemId>& bag, const Schema& s);

// set-level helpers over attribute / FD indices
std::vector<int> outside(const std::vector<int>& y, const std::vector<int>& at, const std::vector<int>& fd,
                         const Schema& s);
bool consistent(const std::vector<int>& fc, const std::vector<int>& c_ord, const Schema& s);
bool unique(const std::vector<int>& dc1, const std::vector<int>& dc2, const std::vector<int>& fc, const Schema& s);

using PrimalityTable = NodeTable<PrimalityTuple>;

struct PassStats {
    std::vector<std::uint32_t> visits;     // per node, across all passes
    std::vector<std::size_t> node_cells;   // per node, across all passes
    std::size_t cells = 0;
};

/// Requires an FD-bag-closed decomposition of schema_to_structure(s).
PrimalityTable primality_solve_up(const Schema& s, const ModifiedTD& td, PassStats* stats = nullptr);
PrimalityTable primality_solve_down(const Schema& s, const ModifiedTD& td, const PrimalityTable& up,
                                    PassStats* stats = nullptr);

/// Success condition at one node for the attribute at bag position pos.
bool primality_success(const PrimalityTuple& t, const std::vector<ElemId>& bag, const Schema& s, int pos);

/// Re-roots at a bag containing the attribute when the root lacks it.
bool primality_decide(const Schema& s, const ModifiedTD& td, int attribute, PassStats* stats = nullptr);
/// Decision at an arbitrary node by joining its up and down tables.
bool primality_at_node(const Schema& s, const ModifiedTD& td, const PrimalityTable& up,
                       const PrimalityTable& down, NodeId node, int attribute);

/// One up pass, one down pass, one check per leaf. The decomposition must be
/// FD-bag-closed and enumeration-ready.
std::vector<int> enumerate_primes(const Schema& s, const ModifiedTD& td, PassStats* stats = nullptr);

/// Full pipeline from a plain decomposition of schema_to_structure(s).
ModifiedTD primality_ready(const Schema& s, const TreeDecomposition& td);

/// Upper bound on a node's PrimalityTuple count; depends on the bag only.
double primality_table_bound(std::size_t n_att, std::size_t n_fd);

}  // namespace mdtw
