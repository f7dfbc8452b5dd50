#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mdtw/engine.hpp"
#include "mdtw/error.hpp"
#include "mdtw/oracle.hpp"
#include "mdtw/solvers.hpp"
#include "mdtw/tautd.hpp"

namespace mdtw::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_out(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Failure("cannot write " + path);
    f << text;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> names(const std::vector<ElemId>& bag, const TauStructure& a) {
    std::vector<std::string> out;
    for (auto e : bag) out.push_back(e < a.domain().size() ? a.element_name(e) : std::to_string(e));
    return out;
}

json tree_json(const TreeDecomposition& td, const TauStructure& a) {
    json nodes = json::array();
    for (NodeId n = 0; n < td.size(); ++n) {
        json node{{"id", n}, {"bag", names(td.bags[n], a)}, {"children", td.children[n]}};
        node["parent"] = td.parent[n] == kNoNode ? json(nullptr) : json(td.parent[n]);
        nodes.push_back(std::move(node));
    }
    return {{"width", td.width()}, {"root", td.root}, {"node_count", td.size()}, {"nodes", std::move(nodes)}};
}

struct Options {
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string td_path;
    bool validate = false;
};

struct Loaded {
    Instance inst;
    TauStructure structure;
    TreeDecomposition td;
};

bool is_schema(const Instance& in) { return std::holds_alternative<Schema>(in); }

/// Reads the instance and either the given decomposition or a min-fill one; always validated.
Loaded load_with_td(const std::string& input, const Options& opt, std::ostream& err) {
    Loaded l{load_instance(input), {}, {}};
    l.structure = to_structure(l.inst);
    if (!opt.td_path.empty())
        l.td = read_td(slurp(opt.td_path));
    else
        l.td = heuristic_decompose(l.structure, Strategy::MinFill);
    const auto report = validate(l.structure, l.td);
    if (opt.validate) err << report.to_string() << '\n';
    if (!report.valid()) throw Failure("invalid decomposition:\n" + report.to_string());
    return l;
}

void check_valid(const TauStructure& a, const TreeDecomposition& td, const Options& opt, std::ostream& err) {
    const auto report = validate(a, td);
    if (opt.validate) err << report.to_string() << '\n';
    if (!report.valid()) throw Failure("internal: produced an invalid decomposition:\n" + report.to_string());
}

int attribute_index(const Schema& s, const std::string& name) {
    const auto a = s.find_attribute(name);
    if (!a) throw Failure("unknown attribute " + name);
    return *a;
}

std::vector<std::string> attribute_names(const Schema& s, const std::vector<int>& atts) {
    std::vector<std::string> out;
    for (int a : atts) out.push_back(s.attribute_name(a));
    return out;
}

int emit_result(json result, const Options& opt, std::ostream& out, int code) {
    if (opt.format == "text") {
        if (result.contains("primes")) {
            bool first = true;
            for (const auto& p : result["primes"]) {
                out << (first ? "" : " ") << p.get<std::string>();
                first = false;
            }
            out << '\n';
        } else {
            out << (result["decision"].get<bool>() ? "yes" : "no") << '\n';
        }
    } else {
        out << result.dump(2) << '\n';
    }
    return code;
}

TauStructure facts_structure(const DatalogProgram& p) {
    TauStructure edb;
    for (const auto& r : p.rules) {
        if (!r.body.empty() || !r.vars.empty()) throw Failure("facts file may contain ground facts only");
        const auto& info = p.predicates[r.head.pred];
        const auto pred = edb.add_predicate(info.name, info.arity);
        std::vector<ElemId> args;
        for (const auto& t : r.head.args) args.push_back(edb.add_element(p.constants[t.id]));
        edb.add_fact(pred, std::move(args));
    }
    return edb;
}

}  // namespace

Instance load_instance(const std::string& path) {
    if (!fs::exists(path)) throw Failure("no such file: " + path);
    const auto text = slurp(path);
    const auto ext = fs::path(path).extension().string();
    if (ext == ".fd" || ext == ".schema") return parse_schema(text);
    if (ext == ".edges" || ext == ".gr" || ext == ".col" || ext == ".graph") return parse_graph(text);
    if (text.find("->") != std::string::npos || text.find("atts:") != std::string::npos) return parse_schema(text);
    return parse_graph(text);
}

TauStructure to_structure(const Instance& in) {
    if (const auto* s = std::get_if<Schema>(&in)) return schema_to_structure(*s);
    return graph_to_structure(std::get<Graph>(in));
}

json td_to_json(const TreeDecomposition& td, const TauStructure& a) { return tree_json(td, a); }

json td_to_json(const NormalizedTD& td, const TauStructure& a) {
    auto j = tree_json(td.td, a);
    for (NodeId n = 0; n < td.td.size(); ++n) j["nodes"][n]["kind"] = to_string(td.kind[n]);
    return j;
}

json td_to_json(const ModifiedTD& td, const TauStructure& a) {
    auto j = tree_json(td.td, a);
    for (NodeId n = 0; n < td.size(); ++n) {
        j["nodes"][n]["kind"] = to_string(td.kind[n]);
        if (td.kind[n] == NodeKind::Intro || td.kind[n] == NodeKind::Remove)
            j["nodes"][n]["elem"] = a.element_name(td.elem[n]);
    }
    j["kind_counts"] = td.kind_counts();
    return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monadic datalog over tree decompositions"};
    app.name("mdtw");
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_option("--seed", opt.seed, "Random seed");
    app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--td", opt.td_path, "Tree decomposition (.td)");
    app.add_flag("--validate", opt.validate, "Print validation reports");

    std::string input, output;

    auto* decompose = app.add_subcommand("decompose", "Heuristic tree decomposition");
    std::string strategy = "min-fill";
    decompose->add_option("input", input)->required();
    decompose->add_option("--strategy", strategy)->check(CLI::IsMember({"min-degree", "min-fill", "exact"}));
    decompose->add_option("-o,--out", output);

    auto* normalize = app.add_subcommand("normalize", "Normal forms as JSON");
    std::string form = "modified";
    normalize->add_option("input", input)->required();
    normalize->add_option("--form", form)->check(CLI::IsMember({"def21", "modified", "enum"}));
    normalize->add_option("-o,--out", output);

    auto* encode_cmd = app.add_subcommand("encode", "Datalog facts of the tau_td structure");
    encode_cmd->add_option("input", input)->required();
    encode_cmd->add_option("-o,--out", output);

    auto* run_cmd = app.add_subcommand("run", "Evaluate a datalog program over a facts file");
    std::string program_path, facts_path;
    bool emit_ground = false;
    run_cmd->add_option("program", program_path)->required();
    run_cmd->add_option("facts", facts_path)->required();
    run_cmd->add_flag("--emit-ground", emit_ground);

    std::string problem, attr;
    bool via_engine = false;
    auto* solve = app.add_subcommand("solve", "Decide 3-colorability or primality");
    solve->add_option("problem", problem)->required()->check(CLI::IsMember({"3col", "prime", "primes"}));
    solve->add_option("input", input)->required();
    solve->add_option("--attr", attr);
    solve->add_flag("--via-engine", via_engine);

    auto* oracle = app.add_subcommand("oracle", "Brute-force reference answers");
    oracle->add_option("problem", problem)->required()->check(CLI::IsMember({"3col", "prime", "primes", "keys"}));
    oracle->add_option("input", input)->required();
    oracle->add_option("--attr", attr);

    auto* gen = app.add_subcommand("gen", "Generate a benchmark schema and decomposition");
    int n_att = 3, n_fd = 1, width = 3;
    std::string prefix;
    gen->add_option("--n-att", n_att)->required();
    gen->add_option("--n-fd", n_fd)->required();
    gen->add_option("--width", width);
    gen->add_option("-o,--out", prefix, "Writes <prefix>.fd and <prefix>.td");

    auto* bench = app.add_subcommand("bench", "Primality scaling experiment");
    std::string rows_path;
    int repeat = 5;
    bench->add_option("--rows", rows_path, "`width n_att n_fd` per line; default: the tw=3 table");
    bench->add_option("--repeat", repeat);
    bench->add_option("-o,--out", output);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*decompose) {
            const auto inst = load_instance(input);
            const auto a = to_structure(inst);
            TreeDecomposition td;
            if (strategy == "exact")
                td = exact_treewidth(a).td;
            else
                td = heuristic_decompose(a, strategy == "min-degree" ? Strategy::MinDegree : Strategy::MinFill);
            check_valid(a, td, opt, err);
            write_out(output, write_td(td, a.domain().size()), out);
            return 0;
        }

        if (*normalize) {
            auto l = load_with_td(input, opt, err);
            json j;
            if (form == "def21") {
                const auto nt = normalize_def21(l.td, l.structure);
                check_valid(l.structure, nt.td, opt, err);
                const auto v = def21_violations(nt);
                if (!v.empty()) throw Failure("internal: not in normal form: " + v.front());
                j = td_to_json(nt, l.structure);
            } else {
                ModifiedTD m = normalize_modified(l.td);
                if (form == "enum") {
                    if (!is_schema(l.inst)) throw Failure("--form enum needs a schema");
                    m = primality_ready(std::get<Schema>(l.inst), l.td);
                }
                check_valid(l.structure, m.td, opt, err);
                j = td_to_json(m, l.structure);
            }
            j["form"] = form;
            write_out(output, j.dump(2) + "\n", out);
            return 0;
        }

        if (*encode_cmd) {
            auto l = load_with_td(input, opt, err);
            const auto nt = normalize_def21(l.td, l.structure);
            check_valid(l.structure, nt.td, opt, err);
            const auto enc = encode(l.structure, nt);
            for (const auto& [wanted, used] : enc.renamed) err << "renamed " << wanted << " -> " << used << '\n';
            write_out(output, to_datalog_facts(enc.structure), out);
            return 0;
        }

        if (*run_cmd) {
            const auto program = parse_program(slurp(program_path));
            const auto edb = facts_structure(parse_program(slurp(facts_path)));
            EvalStats stats;
            const auto t0 = std::chrono::steady_clock::now();
            const auto g = ground(program, edb);
            if (emit_ground) err << g.to_string();
            const auto model = eval_ground(g, &stats);
            const double ms = ms_since(t0);
            if (opt.format == "text") {
                for (const auto& f : model.derived_facts()) out << f << ".\n";
            } else {
                json j{{"problem", "run"},
                       {"instance", fs::path(program_path).filename().string()},
                       {"derived", model.derived_facts()},
                       {"ground_rules", stats.ground_rules},
                       {"body_literals", stats.body_literals},
                       {"edb_facts", stats.edb_facts},
                       {"elapsed_ms", ms}};
                out << j.dump(2) << '\n';
            }
            return 0;
        }

        if (*solve) {
            auto l = load_with_td(input, opt, err);
            json result{{"problem", problem},
                        {"instance", fs::path(input).filename().string()},
                        {"width", l.td.width()}};
            if (problem == "3col") {
                if (is_schema(l.inst)) throw Failure("3col needs a graph");
                const auto& g = std::get<Graph>(l.inst);
                bool yes = false;
                if (via_engine) {
                    const auto nt = normalize_def21(l.td, l.structure);
                    EvalStats stats;
                    const auto t0 = std::chrono::steady_clock::now();
                    yes = g.vertex_count() == 0 || three_col_via_engine(g, nt, &stats);
                    result["elapsed_ms"] = ms_since(t0);
                    result["node_count"] = nt.td.size();
                    result["table_sizes"] = json::array();
                    result["ground_rules"] = stats.ground_rules;
                } else {
                    const auto m = normalize_modified(l.td);
                    const auto t0 = std::chrono::steady_clock::now();
                    const auto table = three_col_solve_up(g, m);
                    yes = g.vertex_count() == 0 || !table.at[m.td.root].empty();
                    result["elapsed_ms"] = ms_since(t0);
                    result["node_count"] = m.size();
                    result["table_sizes"] = table.sizes();
                }
                result["decision"] = yes;
                return emit_result(std::move(result), opt, out, yes ? 0 : 1);
            }
            if (!is_schema(l.inst)) throw Failure(problem + " needs a schema");
            if (via_engine) throw Failure("--via-engine is available for 3col only");
            const auto& s = std::get<Schema>(l.inst);
            PassStats stats;
            if (problem == "prime") {
                if (attr.empty()) throw Failure("prime needs --attr");
                const int a = attribute_index(s, attr);
                const auto m = enforce_fd_bag_closure(normalize_modified(l.td), s);
                const auto t0 = std::chrono::steady_clock::now();
                const bool yes = primality_decide(s, m, a, &stats);
                result["elapsed_ms"] = ms_since(t0);
                result["attribute"] = attr;
                result["decision"] = yes;
                result["node_count"] = m.size();
                result["table_sizes"] = stats.node_cells;
                return emit_result(std::move(result), opt, out, yes ? 0 : 1);
            }
            const auto m = primality_ready(s, l.td);
            const auto t0 = std::chrono::steady_clock::now();
            const auto primes = enumerate_primes(s, m, &stats);
            result["elapsed_ms"] = ms_since(t0);
            result["primes"] = attribute_names(s, primes);
            result["node_count"] = m.size();
            result["table_sizes"] = stats.node_cells;
            return emit_result(std::move(result), opt, out, primes.empty() ? 1 : 0);
        }

        if (*oracle) {
            const auto inst = load_instance(input);
            json result{{"problem", problem}, {"instance", fs::path(input).filename().string()}, {"oracle", true}};
            const auto t0 = std::chrono::steady_clock::now();
            if (problem == "3col") {
                if (is_schema(inst)) throw Failure("3col needs a graph");
                const bool yes = three_col_brute(std::get<Graph>(inst));
                result["decision"] = yes;
                result["elapsed_ms"] = ms_since(t0);
                return emit_result(std::move(result), opt, out, yes ? 0 : 1);
            }
            if (!is_schema(inst)) throw Failure(problem + " needs a schema");
            const auto& s = std::get<Schema>(inst);
            if (problem == "prime") {
                if (attr.empty()) throw Failure("prime needs --attr");
                const int a = attribute_index(s, attr);
                const auto primes = prime_brute(s);
                const bool yes = std::find(primes.begin(), primes.end(), a) != primes.end();
                const bool phi = mso_phi_check(s, a);
                if (yes != phi) throw Failure("internal: oracles disagree on " + attr);
                result["attribute"] = attr;
                result["decision"] = yes;
                result["elapsed_ms"] = ms_since(t0);
                return emit_result(std::move(result), opt, out, yes ? 0 : 1);
            }
            if (problem == "keys") {
                json keys = json::array();
                for (const auto& k : all_keys(s)) keys.push_back(attribute_names(s, k));
                result["keys"] = keys;
                result["elapsed_ms"] = ms_since(t0);
                if (opt.format == "text") {
                    for (const auto& k : keys) {
                        for (const auto& a : k) out << a.get<std::string>();
                        out << '\n';
                    }
                } else {
                    out << result.dump(2) << '\n';
                }
                return keys.empty() ? 1 : 0;
            }
            const auto primes = prime_brute(s);
            result["primes"] = attribute_names(s, primes);
            result["elapsed_ms"] = ms_since(t0);
            return emit_result(std::move(result), opt, out, primes.empty() ? 1 : 0);
        }

        if (*gen) {
            const auto inst = generate_benchmark(n_att, n_fd, width, opt.seed);
            const auto a = schema_to_structure(inst.schema);
            check_valid(a, inst.td.td, opt, err);
            const auto td_text = write_td(inst.td.td, a.domain().size());
            if (prefix.empty()) {
                json j{{"schema", serialize_schema(inst.schema)},
                       {"td", td_text},
                       {"width", inst.td.width()},
                       {"node_count", inst.td.size()},
                       {"kind_counts", inst.kind_counts}};
                out << j.dump(2) << '\n';
            } else {
                write_out(prefix + ".fd", serialize_schema(inst.schema), out);
                write_out(prefix + ".td", td_text, out);
            }
            return 0;
        }

        if (*bench) {
            const auto rows = rows_path.empty() ? table1_rows() : parse_bench_rows(slurp(rows_path));
            const auto records = run_bench(rows, opt.seed, repeat);
            const auto fit = fit_linear(records);
            std::ostringstream csv;
            csv << bench_csv(records);
            csv << "# slope_ms_per_node=" << fit.slope << " intercept_ms=" << fit.intercept << " r2=" << fit.r2
                << '\n';
            write_out(output, csv.str(), out);
            for (const auto& r : records)
                if (!r.error.empty())
                    err << "row " << r.row.width << ' ' << r.row.n_att << ' ' << r.row.n_fd << ": " << r.error << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace mdtw::cli
