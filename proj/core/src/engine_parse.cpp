#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "mdtw/engine.hpp"
#include "mdtw/error.hpp"
#include "mdtw/tautd.hpp"

namespace mdtw {

std::optional<std::uint32_t> DatalogProgram::find_predicate(std::string_view name) const {
    for (std::uint32_t i = 0; i < predicates.size(); ++i)
        if (predicates[i].name == name) return i;
    return std::nullopt;
}

std::uint32_t DatalogProgram::intern_predicate(std::string_view name, int arity) {
    if (auto p = find_predicate(name)) {
        if (predicates[*p].arity != arity)
            throw InvalidArgument("predicate " + std::string(name) + " used with arities " +
                                  std::to_string(predicates[*p].arity) + " and " + std::to_string(arity));
        return *p;
    }
    predicates.push_back({std::string(name), arity, false});
    return static_cast<std::uint32_t>(predicates.size() - 1);
}

std::uint32_t DatalogProgram::intern_constant(std::string_view name) {
    for (std::uint32_t i = 0; i < constants.size(); ++i)
        if (constants[i] == name) return i;
    constants.emplace_back(name);
    return static_cast<std::uint32_t>(constants.size() - 1);
}

std::string DatalogProgram::to_string(const Rule& r) const {
    auto atom = [&](const Atom& a) {
        std::string s = predicates[a.pred].name;
        if (!a.args.empty()) {
            s += '(';
            for (std::size_t i = 0; i < a.args.size(); ++i) {
                if (i) s += ',';
                s += a.args[i].is_var ? r.vars[a.args[i].id] : datalog_constant(constants[a.args[i].id]);
            }
            s += ')';
        }
        return s;
    };
    std::string s = atom(r.head);
    for (std::size_t i = 0; i < r.body.size(); ++i) {
        s += i ? ", " : " :- ";
        if (r.body[i].negated) s += "not ";
        s += atom(r.body[i].atom);
    }
    return s + ".";
}

std::vector<std::string> DatalogProgram::monadic_lint() const {
    std::vector<std::string> out;
    for (const auto& p : predicates)
        if (p.intensional && p.arity > 1) out.push_back(p.name);
    return out;
}

std::size_t DatalogProgram::size() const {
    std::size_t n = 0;
    for (const auto& r : rules) n += 1 + r.body.size();
    return n;
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    DatalogProgram run() {
        struct PendingFd {
            std::string pred;
            std::vector<int> from, to;
            int line, col;
        };
        std::vector<PendingFd> pending;
        std::vector<std::pair<int, int>> rule_pos;
        skip();
        while (!eof()) {
            if (peek() == '@') {
                const int l = line_, c = col_;
                advance();
                const auto kw = ident();
                if (kw != "fd") fail("unknown directive @" + kw, l, c);
                skip();
                PendingFd fd{ident(), {}, {}, l, c};
                expect(':');
                fd.from = positions();
                expect('-');
                if (peek() != '>') fail("expected `->`");
                advance();
                fd.to = positions();
                expect('.');
                pending.push_back(std::move(fd));
            } else {
                rule_pos.emplace_back(line_, col_);
                clause();
            }
            skip();
        }

        // intensional = occurs in some head
        for (const auto& r : prog_.rules) prog_.predicates[r.head.pred].intensional = true;
        for (std::size_t i = 0; i < prog_.rules.size(); ++i) {
            const auto& r = prog_.rules[i];
            const auto [l, c] = rule_pos[i];
            std::set<std::uint32_t> bound;
            for (const auto& lit : r.body)
                if (!lit.negated)
                    for (const auto& t : lit.atom.args)
                        if (t.is_var) bound.insert(t.id);
            for (const auto& lit : r.body) {
                if (lit.negated && prog_.predicates[lit.atom.pred].intensional)
                    fail("negated intensional atom " + prog_.predicates[lit.atom.pred].name +
                             " (negation is only allowed on extensional predicates)",
                         l, c);
                if (lit.negated)
                    for (const auto& t : lit.atom.args)
                        if (t.is_var && !bound.contains(t.id))
                            fail("variable " + r.vars[t.id] + " occurs only in a negated literal", l, c);
            }
            for (const auto& t : r.head.args)
                if (t.is_var && !bound.contains(t.id))
                    fail("rule is not range-restricted: head variable " + r.vars[t.id] +
                             " does not occur in a positive body atom",
                         l, c);
        }
        for (const auto& fd : pending) {
            const auto p = prog_.find_predicate(fd.pred);
            if (!p) continue;
            FdDecl d{*p, {}, {}};
            for (int x : fd.from) {
                if (x < 1 || x > prog_.predicates[*p].arity) fail("@fd position out of range", fd.line, fd.col);
                d.from.push_back(x - 1);
            }
            for (int x : fd.to) {
                if (x < 1 || x > prog_.predicates[*p].arity) fail("@fd position out of range", fd.line, fd.col);
                d.to.push_back(x - 1);
            }
            prog_.fds.push_back(std::move(d));
        }
        return std::move(prog_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }
    [[noreturn]] void fail(const std::string& msg, int l, int c) const { throw ParseError(msg, l, c); }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }
    void advance() {
        if (s_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip() {
        while (!eof()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else if (peek() == '%') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }
    void expect(char c) {
        skip();
        if (peek() != c) fail(std::string("expected `") + c + "`" + (eof() ? " before end of input" : ""));
        advance();
        skip();
    }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
    std::string ident() {
        skip();
        const auto start = pos_;
        while (!eof() && ident_char(peek())) advance();
        if (start == pos_) fail("expected an identifier");
        return std::string(s_.substr(start, pos_ - start));
    }
    std::vector<int> positions() {
        std::vector<int> out;
        while (true) {
            skip();
            const auto tok = ident();
            int v = 0;
            for (char c : tok) {
                if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected an argument position");
                v = v * 10 + (c - '0');
            }
            out.push_back(v);
            skip();
            if (peek() != ',') break;
            advance();
        }
        return out;
    }

    Term term(Rule& r, std::map<std::string, std::uint32_t>& vars) {
        skip();
        if (peek() == '"') {
            advance();
            std::string v;
            while (!eof() && peek() != '"') {
                if (peek() == '\\') advance();
                if (eof()) break;
                v += peek();
                advance();
            }
            if (eof()) fail("unterminated string constant");
            advance();
            return {false, prog_.intern_constant(v)};
        }
        const int l = line_, c = col_;
        const auto name = ident();
        const char first = name[0];
        if (std::isupper(static_cast<unsigned char>(first)) || first == '_') {
            std::string key = name;
            if (name == "_") key = "_" + std::to_string(r.vars.size());
            auto [it, fresh] = vars.try_emplace(key, static_cast<std::uint32_t>(r.vars.size()));
            if (fresh) r.vars.push_back(key);
            return {true, it->second};
        }
        if (!std::islower(static_cast<unsigned char>(first)) && !std::isdigit(static_cast<unsigned char>(first)))
            fail("malformed term", l, c);
        return {false, prog_.intern_constant(name)};
    }

    Atom atom(Rule& r, std::map<std::string, std::uint32_t>& vars) {
        skip();
        const int l = line_, c = col_;
        const auto name = ident();
        if (!std::islower(static_cast<unsigned char>(name[0])))
            fail("predicate names start with a lowercase letter: " + name, l, c);
        std::vector<Term> args;
        skip();
        if (peek() == '(') {
            advance();
            while (true) {
                args.push_back(term(r, vars));
                skip();
                if (peek() == ',') {
                    advance();
                    continue;
                }
                if (peek() == ')') {
                    advance();
                    break;
                }
                fail("expected `,` or `)` in argument list");
            }
        }
        try {
            return {prog_.intern_predicate(name, static_cast<int>(args.size())), std::move(args)};
        } catch (const InvalidArgument& e) {
            fail(e.what(), l, c);
        }
    }

    void clause() {
        Rule r;
        r.line = line_;
        std::map<std::string, std::uint32_t> vars;
        r.head = atom(r, vars);
        skip();
        if (peek() == ':') {
            advance();
            if (peek() != '-') fail("expected `:-`");
            advance();
            while (true) {
                skip();
                Literal lit;
                const auto save = pos_;
                const int sl = line_, sc = col_;
                if (!eof() && std::islower(static_cast<unsigned char>(peek()))) {
                    const auto word = ident();
                    skip();
                    if (word == "not" && !eof() && (std::isalpha(static_cast<unsigned char>(peek())))) {
                        lit.negated = true;
                    } else {
                        pos_ = save;
                        line_ = sl;
                        col_ = sc;
                    }
                }
                lit.atom = atom(r, vars);
                r.body.push_back(std::move(lit));
                skip();
                if (peek() == ',') {
                    advance();
                    continue;
                }
                break;
            }
        }
        expect('.');
        prog_.rules.push_back(std::move(r));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    DatalogProgram prog_;
};

}  // namespace

DatalogProgram parse_program(std::string_view text) { return Parser(text).run(); }

}  // namespace mdtw
