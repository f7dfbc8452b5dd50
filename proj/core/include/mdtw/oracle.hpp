#pragma once

#include <cstddef>
#include <vector>

#include "mdtw/decomp.hpp"
#include "mdtw/solvers.hpp"
#include "mdtw/structures.hpp"

namespace mdtw {

struct OracleCaps {
    std::size_t attributes = 20;
    std::size_t vertices = 22;
};

/// Attribute closure under all FDs; result sorted.
std::vector<int> closure(const std::vector<int>& x, const Schema& s);

/// All keys, by cardinality then lexicographic order. Throws CapExceeded.
std::vector<std::vector<int>> all_keys(const Schema& s, std::size_t cap = OracleCaps{}.attributes);
/// Union of all keys, sorted.
std::vector<int> prime_brute(const Schema& s, std::size_t cap = OracleCaps{}.attributes);
/// Some closed Y without a has closure(Y + a) = R.
bool mso_phi_check(const Schema& s, int attribute, std::size_t cap = OracleCaps{}.attributes);

bool three_col_brute(const Graph& g, std::size_t cap = OracleCaps{}.vertices);

/// Nodes of the subtree rooted at s.
std::vector<NodeId> subtree_nodes(const TreeDecomposition& td, NodeId s);
/// Nodes outside the subtree of s, plus s itself.
std::vector<NodeId> envelope_nodes(const TreeDecomposition& td, NodeId s);

/// Bag tuples at s that extend to a proper coloring of the vertices covered by region.
std::vector<ColorTuple> property_a_tuples(const Graph& g, const ModifiedTD& td, const std::vector<NodeId>& region,
                                          NodeId s);
/// Bag tuples at s with an extension over the region's attributes and FDs; sorted.
std::vector<PrimalityTuple> property_b_tuples(const Schema& sc, const ModifiedTD& td,
                                              const std::vector<NodeId>& region, NodeId s);

}  // namespace mdtw
