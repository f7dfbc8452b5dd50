#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "mdtw/engine.hpp"
#include "mdtw/error.hpp"

namespace mdtw {

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto x : v) {
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fact_key(const std::string& pred, const std::vector<std::string>& args) {
    std::string s = pred;
    if (!args.empty()) {
        s += '(';
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) s += ',';
            s += args[i];
        }
        s += ')';
    }
    return s;
}

}  // namespace

std::vector<FdDecl> effective_fds(const DatalogProgram& p) {
    std::vector<FdDecl> out = p.fds;
    auto declared = [&](std::uint32_t pred) {
        return std::any_of(p.fds.begin(), p.fds.end(), [&](const FdDecl& d) { return d.pred == pred; });
    };
    for (const char* name : {"child1", "child2"}) {
        const auto id = p.find_predicate(name);
        if (!id || p.predicates[*id].intensional || p.predicates[*id].arity != 2 || declared(*id)) continue;
        out.push_back({*id, {0}, {1}});
        out.push_back({*id, {1}, {0}});
    }
    if (const auto id = p.find_predicate("bag");
        id && !p.predicates[*id].intensional && p.predicates[*id].arity >= 2 && !declared(*id)) {
        FdDecl d{*id, {0}, {}};
        for (int i = 1; i < p.predicates[*id].arity; ++i) d.to.push_back(i);
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<int> infer_guards(const DatalogProgram& p) {
    const auto fds = effective_fds(p);
    std::vector<int> guards;
    for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
        const auto& r = p.rules[ri];
        if (r.vars.empty()) {
            guards.push_back(-1);
            continue;
        }
        int found = -1;
        std::vector<bool> best_known;
        for (std::size_t gi = 0; gi < r.body.size() && found < 0; ++gi) {
            const auto& g = r.body[gi];
            if (g.negated || p.predicates[g.atom.pred].intensional) continue;
            std::vector<bool> known(r.vars.size(), false);
            for (const auto& t : g.atom.args)
                if (t.is_var) known[t.id] = true;
            bool changed = true;
            while (changed) {
                changed = false;
                for (const auto& lit : r.body) {
                    if (lit.negated || p.predicates[lit.atom.pred].intensional) continue;
                    for (const auto& d : fds) {
                        if (d.pred != lit.atom.pred) continue;
                        const bool ready = std::all_of(d.from.begin(), d.from.end(), [&](int i) {
                            const auto& t = lit.atom.args[static_cast<std::size_t>(i)];
                            return !t.is_var || known[t.id];
                        });
                        if (!ready) continue;
                        for (int i : d.to) {
                            const auto& t = lit.atom.args[static_cast<std::size_t>(i)];
                            if (t.is_var && !known[t.id]) known[t.id] = changed = true;
                        }
                    }
                }
            }
            if (std::all_of(known.begin(), known.end(), [](bool b) { return b; })) {
                found = static_cast<int>(gi);
            } else if (best_known.empty() ||
                       std::count(known.begin(), known.end(), true) > std::count(best_known.begin(), best_known.end(), true)) {
                best_known = known;
            }
        }
        if (found < 0) {
            std::vector<std::string> missing;
            for (std::size_t v = 0; v < r.vars.size(); ++v)
                if (best_known.empty() || !best_known[v]) missing.push_back(r.vars[v]);
            std::string msg = "rule " + std::to_string(ri + 1) + " (line " + std::to_string(r.line) +
                              ") is not quasi-guarded; unreachable variables:";
            for (const auto& m : missing) msg += " " + m;
            throw NotQuasiGuarded(ri, missing, msg);
        }
        guards.push_back(found);
    }
    return guards;
}

// --- grounding ---------------------------------------------------------------

std::string GroundProgram::atom_to_string(std::uint32_t atom) const {
    const auto& a = atoms[atom];
    std::vector<std::string> args;
    for (auto s : a.args) args.push_back(symbols[s]);
    return fact_key(predicates[a.pred].name, args);
}

std::string GroundProgram::to_string() const {
    std::string out;
    for (const auto& r : rules) {
        out += atom_to_string(r.head);
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            out += i ? ", " : " :- ";
            out += atom_to_string(r.body[i]);
        }
        out += ".\n";
    }
    return out;
}

std::size_t GroundProgram::body_literals() const {
    std::size_t n = 0;
    for (const auto& r : rules) n += r.body.size();
    return n;
}

GroundProgram ground(const DatalogProgram& p, const TauStructure& edb) {
    const auto guards = infer_guards(p);
    const auto fds = effective_fds(p);
    GroundProgram g;
    g.predicates = p.predicates;
    g.symbols = edb.domain();
    std::unordered_map<std::string, std::uint32_t> sym_index;
    for (std::uint32_t i = 0; i < g.symbols.size(); ++i) sym_index.emplace(g.symbols[i], i);
    std::vector<std::uint32_t> const_sym(p.constants.size());
    for (std::size_t i = 0; i < p.constants.size(); ++i) {
        auto [it, fresh] = sym_index.try_emplace(p.constants[i], static_cast<std::uint32_t>(g.symbols.size()));
        if (fresh) g.symbols.push_back(p.constants[i]);
        const_sym[i] = it->second;
    }

    // EDB relations by program predicate
    const auto np = p.predicates.size();
    std::vector<std::vector<std::vector<std::uint32_t>>> rel(np);
    std::vector<std::unordered_set<std::vector<std::uint32_t>, VecHash>> member(np);
    for (std::uint32_t pi = 0; pi < np; ++pi) {
        if (p.predicates[pi].intensional) continue;
        const auto ep = edb.find_predicate(p.predicates[pi].name);
        if (!ep) continue;
        if (edb.signature()[*ep].arity != p.predicates[pi].arity)
            throw InvalidArgument("predicate " + p.predicates[pi].name + " has arity " +
                                  std::to_string(p.predicates[pi].arity) + " in the program but " +
                                  std::to_string(edb.signature()[*ep].arity) + " in the input");
    }
    std::unordered_map<std::string, std::uint32_t> by_name;
    for (std::uint32_t pi = 0; pi < np; ++pi)
        if (!p.predicates[pi].intensional) by_name.emplace(p.predicates[pi].name, pi);
    for (const auto& f : edb.facts()) {
        const auto it = by_name.find(edb.signature()[f.pred].name);
        if (it == by_name.end()) continue;
        std::vector<std::uint32_t> t(f.args.begin(), f.args.end());
        if (member[it->second].insert(t).second) rel[it->second].push_back(std::move(t));
    }

    // FD indexes: key (values at `from`) -> facts
    using Index = std::unordered_map<std::vector<std::uint32_t>, std::vector<std::uint32_t>, VecHash>;
    std::vector<Index> fd_index(fds.size());
    for (std::size_t di = 0; di < fds.size(); ++di) {
        const auto& d = fds[di];
        for (std::uint32_t fi = 0; fi < rel[d.pred].size(); ++fi) {
            std::vector<std::uint32_t> key;
            for (int i : d.from) key.push_back(rel[d.pred][fi][static_cast<std::size_t>(i)]);
            fd_index[di][key].push_back(fi);
        }
    }

    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, VecHash> atom_index;
    auto intern = [&](std::uint32_t pred, std::vector<std::uint32_t> args, bool edb_fact) {
        std::vector<std::uint32_t> key;
        key.reserve(args.size() + 1);
        key.push_back(pred);
        key.insert(key.end(), args.begin(), args.end());
        auto [it, fresh] = atom_index.try_emplace(std::move(key), static_cast<std::uint32_t>(g.atoms.size()));
        if (fresh) {
            g.atoms.push_back({pred, std::move(args)});
            g.is_edb.push_back(edb_fact);
        }
        return it->second;
    };
    // every input fact is part of the model; unknown predicates are appended
    std::vector<std::uint32_t> gpred(edb.signature().size());
    for (std::uint32_t ep = 0; ep < edb.signature().size(); ++ep) {
        const auto& info = edb.signature()[ep];
        if (const auto pi = p.find_predicate(info.name)) {
            if (p.predicates[*pi].arity != info.arity)
                throw InvalidArgument("predicate " + info.name + " has a different arity in the input");
            gpred[ep] = *pi;
        } else {
            gpred[ep] = static_cast<std::uint32_t>(g.predicates.size());
            g.predicates.push_back({info.name, info.arity, false});
        }
    }
    for (const auto& f : edb.facts()) intern(gpred[f.pred], {f.args.begin(), f.args.end()}, true);
    g.edb_facts = g.atoms.size();

    constexpr std::int64_t kUnbound = -1;
    g.per_rule.assign(p.rules.size(), 0);
    g.guard_facts.assign(p.rules.size(), 0);

    for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
        const auto& r = p.rules[ri];
        const int gi = guards[ri];
        auto value = [&](const Term& t, const std::vector<std::int64_t>& b) -> std::int64_t {
            return t.is_var ? b[t.id] : static_cast<std::int64_t>(const_sym[t.id]);
        };
        auto match = [&](const Atom& a, const std::vector<std::uint32_t>& tuple, std::vector<std::int64_t>& b) {
            for (std::size_t i = 0; i < a.args.size(); ++i) {
                const auto& t = a.args[i];
                if (t.is_var) {
                    if (b[t.id] == kUnbound) {
                        b[t.id] = tuple[i];
                    } else if (b[t.id] != tuple[i]) {
                        return false;
                    }
                } else if (const_sym[t.id] != tuple[i]) {
                    return false;
                }
            }
            return true;
        };
        auto finish = [&](const std::vector<std::int64_t>& b) {
            std::vector<std::uint32_t> body;
            for (const auto& lit : r.body) {
                std::vector<std::uint32_t> t;
                for (const auto& term : lit.atom.args) t.push_back(static_cast<std::uint32_t>(value(term, b)));
                if (!p.predicates[lit.atom.pred].intensional) {
                    if (member[lit.atom.pred].contains(t) == lit.negated) return;
                    continue;
                }
                body.push_back(intern(lit.atom.pred, std::move(t), false));
            }
            std::sort(body.begin(), body.end());
            body.erase(std::unique(body.begin(), body.end()), body.end());
            std::vector<std::uint32_t> h;
            for (const auto& term : r.head.args) h.push_back(static_cast<std::uint32_t>(value(term, b)));
            const auto head = intern(r.head.pred, std::move(h), false);
            g.rules.push_back({head, std::move(body), static_cast<std::uint32_t>(ri)});
            ++g.per_rule[ri];
        };
        // complete the binding through FD lookups, then emit
        std::function<void(std::vector<std::int64_t>&)> extend = [&](std::vector<std::int64_t>& b) {
            for (const auto& lit : r.body) {
                if (lit.negated || p.predicates[lit.atom.pred].intensional) continue;
                for (std::size_t di = 0; di < fds.size(); ++di) {
                    const auto& d = fds[di];
                    if (d.pred != lit.atom.pred) continue;
                    bool ready = true, useful = false;
                    std::vector<std::uint32_t> key;
                    for (int i : d.from) {
                        const auto v = value(lit.atom.args[static_cast<std::size_t>(i)], b);
                        if (v == kUnbound) {
                            ready = false;
                            break;
                        }
                        key.push_back(static_cast<std::uint32_t>(v));
                    }
                    if (!ready) continue;
                    for (int i : d.to)
                        if (value(lit.atom.args[static_cast<std::size_t>(i)], b) == kUnbound) useful = true;
                    if (!useful) continue;
                    const auto it = fd_index[di].find(key);
                    if (it == fd_index[di].end()) return;
                    for (auto fi : it->second) {
                        auto nb = b;
                        if (match(lit.atom, rel[d.pred][fi], nb)) extend(nb);
                    }
                    return;
                }
            }
            if (std::find(b.begin(), b.end(), kUnbound) != b.end()) return;
            finish(b);
        };

        if (gi < 0) {
            std::vector<std::int64_t> b;
            finish(b);
            continue;
        }
        const auto& guard = r.body[static_cast<std::size_t>(gi)].atom;
        g.guard_facts[ri] = rel[guard.pred].size();
        for (const auto& t : rel[guard.pred]) {
            std::vector<std::int64_t> b(r.vars.size(), kUnbound);
            if (!match(guard, t, b)) continue;
            extend(b);
        }
    }
    return g;
}

// --- evaluation --------------------------------------------------------------

bool Model::contains(std::string_view pred, const std::vector<std::string>& args) const {
    return index_.contains(fact_key(std::string(pred), args));
}

Model eval_ground(const GroundProgram& g, EvalStats* stats) {
    const auto n = g.atoms.size();
    std::vector<std::uint32_t> count(g.rules.size());
    std::vector<std::uint32_t> start(n + 1, 0);
    for (const auto& r : g.rules)
        for (auto a : r.body) ++start[a + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<std::uint32_t> occ(start.back());
    {
        auto fill = start;
        for (std::uint32_t ri = 0; ri < g.rules.size(); ++ri)
            for (auto a : g.rules[ri].body) occ[fill[a]++] = ri;
    }
    std::vector<bool> truth(n, false);
    std::vector<std::uint32_t> queue;
    for (std::uint32_t a = 0; a < n; ++a)
        if (g.is_edb[a]) {
            truth[a] = true;
            queue.push_back(a);
        }
    for (std::uint32_t ri = 0; ri < g.rules.size(); ++ri) {
        count[ri] = static_cast<std::uint32_t>(g.rules[ri].body.size());
        if (count[ri] == 0 && !truth[g.rules[ri].head]) {
            truth[g.rules[ri].head] = true;
            queue.push_back(g.rules[ri].head);
        }
    }
    std::size_t decrements = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const auto a = queue[qi];
        for (auto k = start[a]; k < start[a + 1]; ++k) {
            const auto ri = occ[k];
            ++decrements;
            if (--count[ri] == 0) {
                const auto h = g.rules[ri].head;
                if (!truth[h]) {
                    truth[h] = true;
                    queue.push_back(h);
                }
            }
        }
    }
    Model m;
    std::size_t derived = 0;
    for (std::uint32_t a = 0; a < n; ++a) {
        if (!truth[a]) continue;
        auto s = g.atom_to_string(a);
        m.index_.insert(s);
        if (!g.is_edb[a]) {
            ++derived;
            m.derived_.push_back(s);
        }
        m.facts_.push_back(std::move(s));
    }
    if (stats) {
        stats->ground_rules = g.rules.size();
        stats->body_literals = g.body_literals();
        stats->decrements = decrements;
        stats->edb_facts = g.edb_facts;
        stats->derived = derived;
    }
    return m;
}

Model evaluate(const DatalogProgram& p, const TauStructure& edb, EvalStats* stats) {
    const auto t0 = Clock::now();
    const auto g = ground(p, edb);
    const double gms = ms_since(t0);
    const auto t1 = Clock::now();
    auto m = eval_ground(g, stats);
    if (stats) {
        stats->ground_ms = gms;
        stats->eval_ms = ms_since(t1);
    }
    return m;
}

}  // namespace mdtw
