#include <charconv>
#include <sstream>

#include "mdtw/decomp.hpp"
#include "mdtw/error.hpp"

namespace mdtw {

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

long number(std::string_view tok, int line) {
    long v = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size())
        throw ParseError("expected a number, got `" + std::string(tok) + "`", line);
    return v;
}

}  // namespace

std::string write_td(const TreeDecomposition& td, std::size_t element_count) {
    std::ostringstream out;
    const auto order = td.preorder();
    std::vector<std::size_t> id(td.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) id[order[i]] = i + 1;
    out << "s td " << order.size() << ' ' << td.width() + 1 << ' ' << element_count << '\n';
    for (auto v : order) {
        out << "b " << id[v];
        for (auto e : td.bags[v]) out << ' ' << e + 1;
        out << '\n';
    }
    for (auto v : order)
        for (auto c : td.children[v]) out << id[v] << ' ' << id[c] << '\n';
    return out.str();
}

TreeDecomposition read_td(std::string_view text) {
    long nb = -1, max_bag = 0, n_elem = 0;
    std::vector<std::vector<ElemId>> bags;
    std::vector<bool> declared;
    std::vector<std::vector<NodeId>> adj;
    std::size_t edges = 0;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        const auto line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto t = tokens(line);
        if (t.empty() || t[0] == "c") continue;
        if (t[0] == "s") {
            if (t.size() != 5 || t[1] != "td") throw ParseError("malformed header, expected `s td <bags> <maxbag> <elements>`", line_no);
            if (nb >= 0) throw ParseError("duplicate header", line_no);
            nb = number(t[2], line_no);
            max_bag = number(t[3], line_no);
            n_elem = number(t[4], line_no);
            if (nb <= 0 || max_bag < 0 || n_elem < 0) throw ParseError("header counts out of range", line_no);
            bags.assign(static_cast<std::size_t>(nb), {});
            declared.assign(static_cast<std::size_t>(nb), false);
            adj.assign(static_cast<std::size_t>(nb), {});
            continue;
        }
        if (nb < 0) throw ParseError("missing `s td` header", line_no);
        if (t[0] == "b") {
            if (t.size() < 2) throw ParseError("malformed bag line", line_no);
            const long id = number(t[1], line_no);
            if (id < 1 || id > nb) throw ParseError("bag id out of range", line_no);
            auto& bag = bags[static_cast<std::size_t>(id - 1)];
            if (declared[static_cast<std::size_t>(id - 1)]) throw ParseError("bag declared twice", line_no);
            declared[static_cast<std::size_t>(id - 1)] = true;
            for (std::size_t i = 2; i < t.size(); ++i) {
                const long e = number(t[i], line_no);
                if (e < 1 || e > n_elem) throw ParseError("element id out of range", line_no);
                bag.push_back(static_cast<ElemId>(e - 1));
            }
            if (static_cast<long>(bag.size()) > max_bag) throw ParseError("bag exceeds declared maximum size", line_no);
            continue;
        }
        if (t.size() != 2) throw ParseError("malformed edge line", line_no);
        const long u = number(t[0], line_no), v = number(t[1], line_no);
        if (u < 1 || v < 1 || u > nb || v > nb || u == v) throw ParseError("edge endpoint out of range", line_no);
        adj[static_cast<std::size_t>(u - 1)].push_back(static_cast<NodeId>(v - 1));
        adj[static_cast<std::size_t>(v - 1)].push_back(static_cast<NodeId>(u - 1));
        ++edges;
    }
    if (nb < 0) throw ParseError("missing `s td` header");
    for (std::size_t i = 0; i < declared.size(); ++i)
        if (!declared[i]) throw ParseError("bag " + std::to_string(i + 1) + " never declared");
    if (edges + 1 != static_cast<std::size_t>(nb)) throw ParseError("tree must have exactly <bags>-1 edges");

    TreeDecomposition td;
    for (auto& b : bags) td.add_node(std::move(b));
    td.root = 0;
    std::vector<bool> seen(td.size(), false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto u : adj[v])
            if (!seen[u]) {
                seen[u] = true;
                ++reached;
                td.attach(v, u);
                stack.push_back(u);
            }
    }
    if (reached != td.size()) throw ParseError("tree edges do not connect all bags");
    return td;
}

}  // namespace mdtw
