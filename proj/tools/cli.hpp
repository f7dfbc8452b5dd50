#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdtw/decomp.hpp"
#include "mdtw/structures.hpp"

namespace mdtw::cli {

/// Exit codes: 0 yes / ok, 1 no / empty, 2 error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

using Instance = std::variant<Schema, Graph>;

/// `.fd`/`.schema` are schemas, `.edges`/`.gr`/`.col`/`.graph` graphs; otherwise sniffed.
Instance load_instance(const std::string& path);
TauStructure to_structure(const Instance& in);

nlohmann::json td_to_json(const TreeDecomposition& td, const TauStructure& a);
nlohmann::json td_to_json(const NormalizedTD& td, const TauStructure& a);
nlohmann::json td_to_json(const ModifiedTD& td, const TauStructure& a);

// --- bench ---

struct BenchRow {
    int width = 3;
    int n_att = 0;
    int n_fd = 0;
};

struct BenchRecord {
    BenchRow row;
    std::size_t n_treenodes = 0;
    double elapsed_ms = 0;
    std::size_t table_cells_total = 0;
    std::string error;  // nonempty for infeasible rows
};

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

/// The eleven tw=3 rows of the scaling table.
std::vector<BenchRow> table1_rows();
/// `width n_att n_fd` per line, `#` comments.
std::vector<BenchRow> parse_bench_rows(std::string_view text);
/// Median of `repeat` timed primality decisions per row.
std::vector<BenchRecord> run_bench(const std::vector<BenchRow>& rows, std::uint64_t seed, int repeat);
/// Least squares of elapsed_ms against n_treenodes over the successful records.
LinearFit fit_linear(const std::vector<BenchRecord>& records);
std::string bench_csv(const std::vector<BenchRecord>& records);

}  // namespace mdtw::cli
