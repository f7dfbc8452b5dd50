#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mdtw/structures.hpp"

namespace mdtw {

struct Term {
    bool is_var = false;
    std::uint32_t id = 0;  // rule variable index, or program constant index

    bool operator==(const Term&) const = default;
};

struct Atom {
    std::uint32_t pred = 0;
    std::vector<Term> args;
};

struct Literal {
    Atom atom;
    bool negated = false;
};

struct Rule {
    Atom head;
    std::vector<Literal> body;
    std::vector<std::string> vars;
    int line = 0;
};

struct PredicateInfo {
    std::string name;
    int arity = 0;
    bool intensional = false;
};

/// Argument positions (0-based) `from` functionally determine `to`.
struct FdDecl {
    std::uint32_t pred = 0;
    std::vector<int> from;
    std::vector<int> to;
};

class DatalogProgram {
public:
    std::vector<PredicateInfo> predicates;
    std::vector<std::string> constants;
    std::vector<Rule> rules;
    std::vector<FdDecl> fds;

    std::optional<std::uint32_t> find_predicate(std::string_view name) const;
    std::uint32_t intern_predicate(std::string_view name, int arity);
    std::uint32_t intern_constant(std::string_view name);

    std::string to_string(const Rule& r) const;
    /// Names of intensional predicates with arity > 1.
    std::vector<std::string> monadic_lint() const;
    std::size_t size() const;  // total number of atoms in all rules
};

/// `head(X) :- a(X,Y), not b(Y).` with `%` comments and `@fd p: 1,2 -> 3.`
DatalogProgram parse_program(std::string_view text);

class NotQuasiGuarded : public std::runtime_error {
public:
    NotQuasiGuarded(std::size_t rule, std::vector<std::string> unreachable, const std::string& what)
        : std::runtime_error(what), rule_(rule), unreachable_(std::move(unreachable)) {}
    std::size_t rule() const noexcept { return rule_; }
    const std::vector<std::string>& unreachable() const noexcept { return unreachable_; }

private:
    std::size_t rule_;
    std::vector<std::string> unreachable_;
};

/// Declared FDs plus the tau_td defaults for undeclared child1, child2, bag.
std::vector<FdDecl> effective_fds(const DatalogProgram& p);
/// Per rule: index of the guard literal in the body, -1 for variable-free rules.
std::vector<int> infer_guards(const DatalogProgram& p);

struct GroundAtom {
    std::uint32_t pred = 0;
    std::vector<std::uint32_t> args;  // symbol ids
};

struct GroundRule {
    std::uint32_t head = 0;
    std::vector<std::uint32_t> body;  // intensional atoms only, deduplicated
    std::uint32_t source = 0;         // index of the originating rule
};

struct GroundProgram {
    std::vector<std::string> symbols;
    std::vector<PredicateInfo> predicates;
    std::vector<GroundAtom> atoms;
    std::vector<bool> is_edb;  // per atom
    std::vector<GroundRule> rules;
    std::vector<std::size_t> per_rule;        // ground rules per source rule
    std::vector<std::size_t> guard_facts;     // EDB facts of each rule's guard predicate
    std::size_t edb_facts = 0;

    std::string atom_to_string(std::uint32_t atom) const;
    std::string to_string() const;
    std::size_t body_literals() const;
};

GroundProgram ground(const DatalogProgram& p, const TauStructure& edb);

struct EvalStats {
    std::size_t ground_rules = 0;
    std::size_t body_literals = 0;
    std::size_t decrements = 0;
    std::size_t edb_facts = 0;
    std::size_t derived = 0;
    double ground_ms = 0;
    double eval_ms = 0;
};

/// Least model restricted to facts mentioned in the ground program plus the EDB.
class Model {
public:
    bool contains(std::string_view pred, const std::vector<std::string>& args = {}) const;
    const std::vector<std::string>& facts() const noexcept { return facts_; }
    std::vector<std::string> derived_facts() const { return derived_; }

private:
    friend Model eval_ground(const GroundProgram& g, EvalStats* stats);
    std::vector<std::string> facts_;
    std::vector<std::string> derived_;
    std::unordered_set<std::string> index_;
};

/// Counting-based propagation (each ground rule keeps a countdown).
Model eval_ground(const GroundProgram& g, EvalStats* stats = nullptr);
Model evaluate(const DatalogProgram& p, const TauStructure& edb, EvalStats* stats = nullptr);

}  // namespace mdtw
