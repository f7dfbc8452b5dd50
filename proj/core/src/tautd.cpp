#include "mdtw/tautd.hpp"

#include <cctype>

#include "mdtw/error.hpp"

namespace mdtw {

TauTdStructure encode(const TauStructure& a, const NormalizedTD& nt) {
    const auto& td = nt.td;
    if (td.size() == 0) throw InvalidArgument("cannot encode an empty decomposition");
    TauTdStructure out;
    out.structure = a;
    out.width = nt.width;
    auto& s = out.structure;
    const auto root = s.add_predicate("root", 1);
    const auto leaf = s.add_predicate("leaf", 1);
    const auto child1 = s.add_predicate("child1", 2);
    const auto child2 = s.add_predicate("child2", 2);
    const auto bag = s.add_predicate("bag", nt.width + 2);

    const auto order = td.preorder();
    out.node_elem.assign(td.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::string wanted = "s" + std::to_string(i + 1);
        std::string name = wanted;
        while (s.find_element(name)) name += '_';
        if (name != wanted) out.renamed.emplace_back(wanted, name);
        out.node_elem[order[i]] = s.add_element(name);
    }
    s.add_fact(root, {out.node_elem[td.root]});
    for (auto v : order) {
        const auto ev = out.node_elem[v];
        const auto& kids = td.children[v];
        if (kids.empty()) s.add_fact(leaf, {ev});
        if (kids.size() > 2) throw InvalidArgument("decomposition is not binary");
        if (!kids.empty()) s.add_fact(child1, {out.node_elem[kids[0]], ev});
        if (kids.size() == 2) s.add_fact(child2, {out.node_elem[kids[1]], ev});
        if (td.bags[v].size() != static_cast<std::size_t>(nt.width + 1))
            throw InvalidArgument("bag tuple size differs from w+1");
        std::vector<ElemId> args{ev};
        args.insert(args.end(), td.bags[v].begin(), td.bags[v].end());
        s.add_fact(bag, std::move(args));
    }
    return out;
}

std::string datalog_constant(std::string_view name) {
    bool plain = !name.empty() && (std::islower(static_cast<unsigned char>(name[0])) ||
                                   std::isdigit(static_cast<unsigned char>(name[0])));
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
    if (plain) return std::string(name);
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string to_datalog_facts(const TauStructure& a) {
    std::string out;
    for (const auto& f : a.facts()) {
        out += a.signature()[f.pred].name;
        if (!f.args.empty()) {
            out += '(';
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (i) out += ',';
                out += datalog_constant(a.element_name(f.args[i]));
            }
            out += ')';
        }
        out += ".\n";
    }
    return out;
}

}  // namespace mdtw
