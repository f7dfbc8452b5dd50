#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mdtw/decomp.hpp"
#include "mdtw/structures.hpp"

namespace mdtw {

/// A structure extended by root, leaf, child1, child2 and bag facts.
struct TauTdStructure {
    TauStructure structure;
    std::vector<ElemId> node_elem;  // NormalizedTD node id -> element id
    std::vector<std::pair<std::string, std::string>> renamed;  // (wanted, used)
    int width = -1;
};

/// Tree nodes become fresh elements s1..sN in preorder; child facts are
/// (child, parent). Colliding names get a trailing underscore.
TauTdStructure encode(const TauStructure& a, const NormalizedTD& td);

/// Quotes a name unless it is a plain lowercase or numeric token.
std::string datalog_constant(std::string_view name);
/// One `pred(arg,...).` line per fact.
std::string to_datalog_facts(const TauStructure& a);

}  // namespace mdtw
