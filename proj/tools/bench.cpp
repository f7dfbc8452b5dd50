#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "cli.hpp"
#include "mdtw/error.hpp"
#include "mdtw/solvers.hpp"

namespace mdtw::cli {

std::vector<BenchRow> table1_rows() {
    return {{3, 3, 1},   {3, 6, 2},   {3, 9, 3},   {3, 12, 4},  {3, 21, 7}, {3, 33, 11},
            {3, 45, 15}, {3, 57, 19}, {3, 69, 23}, {3, 81, 27}, {3, 93, 31}};
}

std::vector<BenchRow> parse_bench_rows(std::string_view text) {
    std::vector<BenchRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        BenchRow r;
        if (!(ls >> r.width)) continue;
        if (!(ls >> r.n_att >> r.n_fd)) throw ParseError("expected `width n_att n_fd`", no, 1);
        std::string extra;
        if (ls >> extra) throw ParseError("trailing token `" + extra + "`", no, 1);
        rows.push_back(r);
    }
    return rows;
}

std::vector<BenchRecord> run_bench(const std::vector<BenchRow>& rows, std::uint64_t seed, int repeat) {
    std::vector<BenchRecord> out;
    repeat = std::max(repeat, 1);
    for (const auto& row : rows) {
        BenchRecord rec;
        rec.row = row;
        try {
            const auto inst = generate_benchmark(row.n_att, row.n_fd, row.width, seed);
            rec.n_treenodes = inst.td.size();
            const auto& root = inst.td.td.bags[inst.td.td.root];
            int attribute = 0;
            for (auto e : root)
                if (inst.schema.is_attribute_elem(e)) {
                    attribute = static_cast<int>(e);
                    break;
                }
            std::vector<double> times;
            for (int i = 0; i < repeat; ++i) {
                PassStats stats;
                const auto t0 = std::chrono::steady_clock::now();
                const bool prime = primality_decide(inst.schema, inst.td, attribute, &stats);
                const auto t1 = std::chrono::steady_clock::now();
                (void)prime;
                times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
                rec.table_cells_total = stats.cells;
            }
            std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
            rec.elapsed_ms = std::max(times[times.size() / 2], 1e-6);
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        out.push_back(std::move(rec));
    }
    return out;
}

LinearFit fit_linear(const std::vector<BenchRecord>& records) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& r : records) {
        if (!r.error.empty()) continue;
        const double x = static_cast<double>(r.n_treenodes), y = r.elapsed_ms;
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    LinearFit f;
    const double vx = n * sxx - sx * sx;
    if (n < 2 || vx == 0) return f;
    f.slope = (n * sxy - sx * sy) / vx;
    f.intercept = (sy - f.slope * sx) / n;
    const double vy = n * syy - sy * sy;
    f.r2 = vy == 0 ? 1.0 : (n * sxy - sx * sy) * (n * sxy - sx * sy) / (vx * vy);
    return f;
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    out << "tw,n_att,n_fd,n_treenodes,elapsed_ms,table_cells_total,error\n";
    for (const auto& r : records) {
        out << r.row.width << ',' << r.row.n_att << ',' << r.row.n_fd << ',';
        if (r.error.empty()) {
            out << r.n_treenodes << ',' << r.elapsed_ms << ',' << r.table_cells_total << ",\n";
        } else {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), '"', '\'');
            out << ",,,\"" << msg << "\"\n";
        }
    }
    return out.str();
}

}  // namespace mdtw::cli
