#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mdtw {

/// Dense id of a domain element. Attributes, FDs, vertices and tree nodes are
/// all addressed this way once they live inside a TauStructure.
using ElemId = std::uint32_t;
using PredId = std::uint32_t;

struct FunctionalDependency {
    std::string id;            // f1, f2, ... unless named explicitly
    std::vector<int> lhs;      // sorted attribute indices, nonempty
    int rhs = -1;              // attribute index

    bool operator==(const FunctionalDependency&) const = default;
};

/// Relational schema (R, F) with single-attribute right-hand sides.
/// Attribute indices are assigned in declaration order.
class Schema {
public:
    Schema() = default;

    /// Appends an attribute; throws InvalidArgument on a duplicate name.
    int add_attribute(std::string name);
    /// Appends an FD over existing attribute indices; the id defaults to f<k>.
    int add_fd(std::vector<int> lhs, int rhs, std::string id = {});

    const std::vector<std::string>& attributes() const noexcept { return attributes_; }
    const std::vector<FunctionalDependency>& fds() const noexcept { return fds_; }
    std::size_t attribute_count() const noexcept { return attributes_.size(); }
    std::size_t fd_count() const noexcept { return fds_.size(); }

    std::optional<int> find_attribute(std::string_view name) const;
    const std::string& attribute_name(int index) const { return attributes_.at(index); }

    /// Structure element ids: attributes first, then FDs.
    ElemId attribute_elem(int index) const noexcept { return static_cast<ElemId>(index); }
    ElemId fd_elem(int index) const noexcept {
        return static_cast<ElemId>(attributes_.size() + index);
    }
    bool is_attribute_elem(ElemId e) const noexcept { return e < attributes_.size(); }
    bool is_fd_elem(ElemId e) const noexcept {
        return e >= attributes_.size() && e < attributes_.size() + fds_.size();
    }
    std::size_t element_count() const noexcept { return attributes_.size() + fds_.size(); }

    bool operator==(const Schema&) const = default;

private:
    std::vector<std::string> attributes_;
    std::vector<FunctionalDependency> fds_;
    std::unordered_map<std::string, int> index_;
};

/// Simple undirected graph; edges are stored once with first < second.
class Graph {
public:
    Graph() = default;

    int add_vertex(std::string name);
    /// Adds {u, v}; duplicates are ignored. Throws on self-loops.
    void add_edge(int u, int v);

    const std::vector<std::string>& vertices() const noexcept { return vertices_; }
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::optional<int> find_vertex(std::string_view name) const;
    bool adjacent(int u, int v) const;
    const std::vector<int>& neighbours(int v) const { return adjacency_.at(v); }

private:
    std::vector<std::string> vertices_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adjacency_;
    std::unordered_map<std::string, int> index_;
};

struct Predicate {
    std::string name;
    int arity = 0;
};

struct Fact {
    PredId pred = 0;
    std::vector<ElemId> args;

    bool operator==(const Fact&) const = default;
    auto operator<=>(const Fact&) const = default;
};

/// Finite relational structure: signature, ordered domain and a fact set.
/// Facts are deduplicated and checked against the signature on insertion.
class TauStructure {
public:
    PredId add_predicate(std::string name, int arity);
    ElemId add_element(std::string name);
    /// Returns false if the fact was already present.
    bool add_fact(PredId pred, std::vector<ElemId> args);
    bool add_fact(std::string_view pred, std::span<const std::string_view> args);

    const std::vector<Predicate>& signature() const noexcept { return preds_; }
    const std::vector<std::string>& domain() const noexcept { return domain_; }
    const std::vector<Fact>& facts() const noexcept { return facts_; }

    std::optional<PredId> find_predicate(std::string_view name) const;
    std::optional<ElemId> find_element(std::string_view name) const;
    const std::string& element_name(ElemId e) const { return domain_.at(e); }
    bool contains(const Fact& f) const;
    std::size_t count(PredId pred) const;

private:
    std::vector<Predicate> preds_;
    std::vector<std::string> domain_;
    std::vector<Fact> facts_;
    std::unordered_map<std::string, PredId> pred_index_;
    std::unordered_map<std::string, ElemId> elem_index_;
    std::unordered_map<std::string, std::size_t> fact_index_;
};

/// `a,b -> c` per line, optional `atts: a,b,...` header, `#` comments.
Schema parse_schema(std::string_view text);
/// Inverse of parse_schema: an `atts:` header followed by one FD per line.
std::string serialize_schema(const Schema& s);

/// One `u v` edge per line; an optional `p edge <n> <m>` header is validated.
/// Lines `v <name>` declare isolated vertices.
Graph parse_graph(std::string_view text);
std::string serialize_graph(const Graph& g);

/// tau = {fd, att, lh, rh}; domain = attributes then FD ids.
TauStructure schema_to_structure(const Schema& s);
/// tau = {e}; both orientations of each edge.
TauStructure graph_to_structure(const Graph& g);
/// Vertices = attributes then FD ids; edge {b, f} iff b occurs in f.
Graph incidence_graph(const Schema& s);

}  // namespace mdtw
