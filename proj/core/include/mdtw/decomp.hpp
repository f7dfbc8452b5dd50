#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdtw/structures.hpp"

namespace mdtw {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Rooted tree of bags. Bags are element-id sequences; the order is
/// meaningful only for Def. 2.1 tuple bags.
struct TreeDecomposition {
    std::vector<std::vector<ElemId>> bags;
    std::vector<std::vector<NodeId>> children;
    std::vector<NodeId> parent;
    NodeId root = kNoNode;

    NodeId add_node(std::vector<ElemId> bag);
    /// Appends child to parent's child list.
    void attach(NodeId parent_node, NodeId child);
    /// Replaces old_child by new_child in parent's child list.
    void replace_child(NodeId parent_node, NodeId old_child, NodeId new_child);

    std::size_t size() const noexcept { return bags.size(); }
    /// Max bag size - 1 (-1 for an empty decomposition).
    int width() const noexcept;
    std::size_t total_bag_size() const noexcept;
    std::vector<NodeId> preorder() const;
    std::vector<NodeId> postorder() const;
    std::size_t leaf_count() const;
};

enum class Strategy { MinDegree, MinFill };

/// Gaifman (primal) graph of a structure, as adjacency lists over element ids.
std::vector<std::vector<ElemId>> gaifman_graph(const TauStructure& a);

/// Decomposition induced by an elimination ordering (a permutation of the domain).
TreeDecomposition decompose_from_order(const TauStructure& a, std::span<const ElemId> order);
/// Elimination-ordering heuristic; ties go to the smallest element id.
TreeDecomposition heuristic_decompose(const TauStructure& a, Strategy strategy);

struct ExactResult {
    int treewidth = -1;
    TreeDecomposition td;
};
/// Exhaustive DP over vertex subsets; throws CapExceeded for domains above cap.
ExactResult exact_treewidth(const TauStructure& a, std::size_t cap = 12);

struct Violation {
    enum class Kind { Structure, MissingElement, UncoveredFact, Disconnected };
    Kind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    int width = -1;
    bool valid() const noexcept { return violations.empty(); }
    std::string to_string() const;
};

ValidationReport validate(const TauStructure& a, const TreeDecomposition& td);

/// Same tree with the given node as root; child order is otherwise kept.
TreeDecomposition reroot(const TreeDecomposition& td, NodeId new_root);

// --- Def. 2.1 normal form ---------------------------------------------------

enum class Def21Kind { Leaf, Permutation, Replace, Branch };

struct NormalizedTD {
    TreeDecomposition td;  // bags are tuples of exactly w+1 distinct elements
    std::vector<Def21Kind> kind;
    int width = -1;
};

NormalizedTD normalize_def21(const TreeDecomposition& td, const TauStructure& a);
/// Lists violations of the Def. 2.1 conditions (empty when normalized).
std::vector<std::string> def21_violations(const NormalizedTD& nt);

// --- modified normal form ---------------------------------------------------

enum class NodeKind : std::uint8_t { Leaf, Intro, Remove, Branch, Copy };

std::string_view to_string(NodeKind k);
std::string_view to_string(Def21Kind k);

struct ModifiedTD {
    TreeDecomposition td;         // bags sorted ascending
    std::vector<NodeKind> kind;
    std::vector<ElemId> elem;     // element introduced/removed; unused otherwise

    std::size_t size() const noexcept { return td.size(); }
    int width() const noexcept { return td.width(); }
    std::map<std::string, std::size_t> kind_counts() const;
};

/// Sorts bags and derives node kinds; throws InvalidArgument if the tree is
/// not in modified normal form.
ModifiedTD classify_modified(TreeDecomposition td);
/// Any valid decomposition to modified normal form. Each edge becomes a chain
/// that removes in descending id order, then introduces in ascending order.
ModifiedTD normalize_modified(const TreeDecomposition& td);

/// Adds rhs(f) to every bag holding FD f, then renormalizes.
ModifiedTD enforce_fd_bag_closure(const ModifiedTD& td, const Schema& s);
bool is_fd_bag_closed(const ModifiedTD& td, const Schema& s);

/// Every required element occurs in a leaf; every branch has a parent with an
/// identical bag (so the root is never a branch).
ModifiedTD prepare_enumeration(const ModifiedTD& td, std::span<const ElemId> required);
ModifiedTD prepare_enumeration(const ModifiedTD& td, const Schema& s);
bool is_enumeration_ready(const ModifiedTD& td, std::span<const ElemId> required);

// --- .td files --------------------------------------------------------------

/// PACE style; elements are written 1-based, bag 1 is the root.
std::string write_td(const TreeDecomposition& td, std::size_t element_count);
TreeDecomposition read_td(std::string_view text);

// --- benchmark generator ----------------------------------------------------

struct BenchmarkInstance {
    Schema schema;
    ModifiedTD td;
    std::map<std::string, std::size_t> kind_counts;
};

/// Balanced decomposition built from FD units laid out as a complete binary
/// tree, expanded depth-first. Throws InvalidArgument when infeasible.
BenchmarkInstance generate_benchmark(int n_att, int n_fd, int width, std::uint64_t seed);

}  // namespace mdtw
