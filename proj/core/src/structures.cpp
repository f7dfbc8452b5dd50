#include "mdtw/structures.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "mdtw/error.hpp"

namespace mdtw {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool valid_token(std::string_view t) {
    if (t.empty()) return false;
    return std::none_of(t.begin(), t.end(), [](char c) {
        return c == ' ' || c == '\t' || c == ',' || c == '#' || c == '>' || c == ':';
    });
}

template <class F>
void for_each_line(std::string_view text, F&& f) {
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        const auto line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
        ++line_no;
        f(line, line_no);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
}

}  // namespace

// --- Schema ----------------------------------------------------------------

int Schema::add_attribute(std::string name) {
    if (index_.contains(name)) throw InvalidArgument("duplicate attribute declaration: " + name);
    const int id = static_cast<int>(attributes_.size());
    index_.emplace(name, id);
    attributes_.push_back(std::move(name));
    return id;
}

int Schema::add_fd(std::vector<int> lhs, int rhs, std::string id) {
    if (lhs.empty()) throw InvalidArgument("FD with empty left-hand side");
    const int n = static_cast<int>(attributes_.size());
    for (int a : lhs)
        if (a < 0 || a >= n) throw InvalidArgument("FD references unknown attribute index");
    if (rhs < 0 || rhs >= n) throw InvalidArgument("FD references unknown attribute index");
    std::sort(lhs.begin(), lhs.end());
    lhs.erase(std::unique(lhs.begin(), lhs.end()), lhs.end());
    if (id.empty()) id = "f" + std::to_string(fds_.size() + 1);
    for (const auto& f : fds_)
        if (f.id == id) throw InvalidArgument("duplicate FD id: " + id);
    fds_.push_back({std::move(id), std::move(lhs), rhs});
    return static_cast<int>(fds_.size()) - 1;
}

std::optional<int> Schema::find_attribute(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Schema parse_schema(std::string_view text) {
    struct PendingFd {
        std::vector<std::string> lhs;
        std::string rhs;
        int line;
    };
    std::vector<std::string> declared;
    bool has_header = false;
    std::vector<PendingFd> pending;

    for_each_line(text, [&](std::string_view raw, int line_no) {
        auto line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty()) return;
        if (line.starts_with("atts:")) {
            has_header = true;
            const auto rest = trim(line.substr(5));
            if (rest.empty()) return;
            for (auto tok : split(rest, ',')) {
                if (!valid_token(tok)) throw ParseError("malformed attribute name", line_no);
                declared.emplace_back(tok);
            }
            return;
        }
        const auto arrow = line.find("->");
        if (arrow == std::string_view::npos) throw ParseError("expected `lhs -> rhs`", line_no);
        const auto lhs_text = trim(line.substr(0, arrow));
        const auto rhs_text = trim(line.substr(arrow + 2));
        if (rhs_text.find(',') != std::string_view::npos)
            throw ParseError("multi-attribute right-hand side: " + std::string(rhs_text), line_no);
        if (!valid_token(rhs_text)) throw ParseError("malformed right-hand side", line_no);
        PendingFd fd{{}, std::string(rhs_text), line_no};
        for (auto tok : split(lhs_text, ',')) {
            if (!valid_token(tok)) throw ParseError("malformed left-hand side", line_no);
            fd.lhs.emplace_back(tok);
        }
        pending.push_back(std::move(fd));
    });

    Schema s;
    for (auto& name : declared) {
        if (s.find_attribute(name)) throw ParseError("duplicate attribute declaration: " + name);
        s.add_attribute(name);
    }
    auto resolve = [&](const std::string& name, int line_no) {
        if (auto a = s.find_attribute(name)) return *a;
        if (has_header) throw ParseError("FD references undeclared attribute " + name, line_no);
        return s.add_attribute(name);
    };
    // Implicit declaration follows first occurrence, lhs before rhs.
    for (const auto& fd : pending) {
        std::vector<int> lhs;
        for (const auto& b : fd.lhs) lhs.push_back(resolve(b, fd.line));
        const int rhs = resolve(fd.rhs, fd.line);
        s.add_fd(std::move(lhs), rhs);
    }
    return s;
}

std::string serialize_schema(const Schema& s) {
    std::ostringstream out;
    out << "atts: ";
    for (std::size_t i = 0; i < s.attributes().size(); ++i) out << (i ? "," : "") << s.attributes()[i];
    out << '\n';
    for (const auto& f : s.fds()) {
        for (std::size_t i = 0; i < f.lhs.size(); ++i) out << (i ? "," : "") << s.attribute_name(f.lhs[i]);
        out << " -> " << s.attribute_name(f.rhs) << '\n';
    }
    return out.str();
}

// --- Graph -----------------------------------------------------------------

int Graph::add_vertex(std::string name) {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    const int id = static_cast<int>(vertices_.size());
    index_.emplace(name, id);
    vertices_.push_back(std::move(name));
    adjacency_.emplace_back();
    return id;
}

void Graph::add_edge(int u, int v) {
    const int n = static_cast<int>(vertices_.size());
    if (u < 0 || v < 0 || u >= n || v >= n) throw InvalidArgument("edge endpoint is not a vertex");
    if (u == v) throw InvalidArgument("self-loop on vertex " + vertices_[u]);
    if (adjacent(u, v)) return;
    edges_.emplace_back(std::min(u, v), std::max(u, v));
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
}

std::optional<int> Graph::find_vertex(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool Graph::adjacent(int u, int v) const {
    const auto& a = adjacency_.at(u);
    return std::find(a.begin(), a.end(), v) != a.end();
}

Graph parse_graph(std::string_view text) {
    Graph g;
    std::optional<std::pair<long, long>> header;
    long edge_lines = 0;
    for_each_line(text, [&](std::string_view raw, int line_no) {
        auto line = trim(raw.substr(0, raw.find('#')));
        if (line.empty() || line.starts_with("c ") || line == "c") return;
        auto toks = split_ws(line);
        if (toks[0] == "p") {
            if (toks.size() != 4 || (toks[1] != "edge" && toks[1] != "tw"))
                throw ParseError("malformed header, expected `p edge <n> <m>`", line_no);
            long n = 0, m = 0;
            auto r1 = std::from_chars(toks[2].data(), toks[2].data() + toks[2].size(), n);
            auto r2 = std::from_chars(toks[3].data(), toks[3].data() + toks[3].size(), m);
            if (r1.ec != std::errc{} || r2.ec != std::errc{} || n < 0 || m < 0)
                throw ParseError("malformed header counts", line_no);
            header.emplace(n, m);
            for (long i = 1; i <= n; ++i) g.add_vertex(std::to_string(i));
            return;
        }
        if (toks[0] == "v") {
            if (toks.size() != 2) throw ParseError("malformed vertex line", line_no);
            g.add_vertex(std::string(toks[1]));
            return;
        }
        if (toks[0] == "e") toks.erase(toks.begin());
        if (toks.size() != 2) throw ParseError("malformed edge line, expected `u v`", line_no);
        if (toks[0] == toks[1]) throw ParseError("self-loop on vertex " + std::string(toks[0]), line_no);
        if (header && (!g.find_vertex(toks[0]) || !g.find_vertex(toks[1])))
            throw ParseError("edge endpoint outside declared vertex range", line_no);
        const int u = g.add_vertex(std::string(toks[0]));
        const int v = g.add_vertex(std::string(toks[1]));
        g.add_edge(u, v);
        ++edge_lines;
    });
    if (header && header->second != edge_lines)
        throw ParseError("header declares " + std::to_string(header->second) + " edges, found " +
                         std::to_string(edge_lines));
    return g;
}

std::string serialize_graph(const Graph& g) {
    std::ostringstream out;
    std::vector<bool> touched(g.vertex_count(), false);
    for (auto [u, v] : g.edges()) touched[u] = touched[v] = true;
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (!touched[v]) out << "v " << g.vertices()[v] << '\n';
    for (auto [u, v] : g.edges()) out << g.vertices()[u] << ' ' << g.vertices()[v] << '\n';
    return out.str();
}

// --- TauStructure ----------------------------------------------------------

namespace {
std::string fact_key(const Fact& f) {
    std::string key = std::to_string(f.pred);
    for (auto a : f.args) {
        key += ':';
        key += std::to_string(a);
    }
    return key;
}
}  // namespace

PredId TauStructure::add_predicate(std::string name, int arity) {
    if (auto it = pred_index_.find(name); it != pred_index_.end()) {
        if (preds_[it->second].arity != arity)
            throw InvalidArgument("predicate " + name + " redeclared with a different arity");
        return it->second;
    }
    const auto id = static_cast<PredId>(preds_.size());
    pred_index_.emplace(name, id);
    preds_.push_back({std::move(name), arity});
    return id;
}

ElemId TauStructure::add_element(std::string name) {
    if (auto it = elem_index_.find(name); it != elem_index_.end()) return it->second;
    const auto id = static_cast<ElemId>(domain_.size());
    elem_index_.emplace(name, id);
    domain_.push_back(std::move(name));
    return id;
}

bool TauStructure::add_fact(PredId pred, std::vector<ElemId> args) {
    if (pred >= preds_.size()) throw InvalidArgument("unknown predicate id");
    if (static_cast<int>(args.size()) != preds_[pred].arity)
        throw InvalidArgument("arity mismatch for predicate " + preds_[pred].name);
    for (auto a : args)
        if (a >= domain_.size()) throw InvalidArgument("fact argument outside the domain");
    Fact f{pred, std::move(args)};
    auto key = fact_key(f);
    if (fact_index_.contains(key)) return false;
    fact_index_.emplace(std::move(key), facts_.size());
    facts_.push_back(std::move(f));
    return true;
}

bool TauStructure::add_fact(std::string_view pred, std::span<const std::string_view> args) {
    const auto p = find_predicate(pred);
    if (!p) throw InvalidArgument("unknown predicate " + std::string(pred));
    std::vector<ElemId> ids;
    for (auto a : args) {
        const auto e = find_element(a);
        if (!e) throw InvalidArgument("unknown element " + std::string(a));
        ids.push_back(*e);
    }
    return add_fact(*p, std::move(ids));
}

std::optional<PredId> TauStructure::find_predicate(std::string_view name) const {
    const auto it = pred_index_.find(std::string(name));
    if (it == pred_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<ElemId> TauStructure::find_element(std::string_view name) const {
    const auto it = elem_index_.find(std::string(name));
    if (it == elem_index_.end()) return std::nullopt;
    return it->second;
}

bool TauStructure::contains(const Fact& f) const { return fact_index_.contains(fact_key(f)); }

std::size_t TauStructure::count(PredId pred) const {
    return static_cast<std::size_t>(
        std::count_if(facts_.begin(), facts_.end(), [&](const Fact& f) { return f.pred == pred; }));
}

// --- encodings -------------------------------------------------------------

TauStructure schema_to_structure(const Schema& s) {
    TauStructure a;
    const auto fd = a.add_predicate("fd", 1);
    const auto att = a.add_predicate("att", 1);
    const auto lh = a.add_predicate("lh", 2);
    const auto rh = a.add_predicate("rh", 2);
    for (const auto& name : s.attributes()) a.add_element(name);
    for (const auto& f : s.fds()) {
        if (a.find_element(f.id)) throw InvalidArgument("FD id collides with attribute name: " + f.id);
        a.add_element(f.id);
    }
    for (std::size_t i = 0; i < s.fd_count(); ++i) a.add_fact(fd, {s.fd_elem(static_cast<int>(i))});
    for (std::size_t b = 0; b < s.attribute_count(); ++b) a.add_fact(att, {static_cast<ElemId>(b)});
    for (std::size_t i = 0; i < s.fd_count(); ++i) {
        const auto& f = s.fds()[i];
        const auto fe = s.fd_elem(static_cast<int>(i));
        for (int b : f.lhs) a.add_fact(lh, {s.attribute_elem(b), fe});
        a.add_fact(rh, {s.attribute_elem(f.rhs), fe});
    }
    return a;
}

TauStructure graph_to_structure(const Graph& g) {
    TauStructure a;
    const auto e = a.add_predicate("e", 2);
    for (const auto& v : g.vertices()) a.add_element(v);
    for (auto [u, v] : g.edges()) {
        a.add_fact(e, {static_cast<ElemId>(u), static_cast<ElemId>(v)});
        a.add_fact(e, {static_cast<ElemId>(v), static_cast<ElemId>(u)});
    }
    return a;
}

Graph incidence_graph(const Schema& s) {
    Graph g;
    for (const auto& name : s.attributes()) g.add_vertex(name);
    for (const auto& f : s.fds()) {
        if (g.find_vertex(f.id)) throw InvalidArgument("FD id collides with attribute name: " + f.id);
        g.add_vertex(f.id);
    }
    for (std::size_t i = 0; i < s.fd_count(); ++i) {
        const auto& f = s.fds()[i];
        const int fv = static_cast<int>(s.fd_elem(static_cast<int>(i)));
        for (int b : f.lhs) g.add_edge(b, fv);
        g.add_edge(f.rhs, fv);
    }
    return g;
}

}  // namespace mdtw
