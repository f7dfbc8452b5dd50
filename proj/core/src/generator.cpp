#include <algorithm>
#include <random>

#include "mdtw/decomp.hpp"
#include "mdtw/error.hpp"

namespace mdtw {

namespace {

struct Builder {
    TreeDecomposition td;
    std::vector<ElemId> bag;
    NodeId cur = kNoNode;

    void leaf(std::vector<ElemId> b) {
        std::sort(b.begin(), b.end());
        bag = std::move(b);
        cur = td.add_node(bag);
    }
    void step(NodeId below) {
        const auto id = td.add_node(bag);
        td.attach(id, below);
        cur = id;
    }
    void intro(ElemId e) {
        bag.insert(std::upper_bound(bag.begin(), bag.end(), e), e);
        step(cur);
    }
    void remove(ElemId e) {
        bag.erase(std::find(bag.begin(), bag.end(), e));
        step(cur);
    }
};

}  // namespace

BenchmarkInstance generate_benchmark(int n_att, int n_fd, int width, std::uint64_t seed) {
    if (width < 1) throw InvalidArgument("generator needs width >= 1");
    if (n_att < 1) throw InvalidArgument("generator needs at least one attribute");
    if (n_fd < 0) throw InvalidArgument("negative FD count");
    BenchmarkInstance out;
    Builder b;

    if (n_fd == 0) {
        for (int i = 1; i <= n_att; ++i) out.schema.add_attribute("a" + std::to_string(i));
        b.leaf({0});
        for (ElemId i = 1; i < static_cast<ElemId>(n_att); ++i) {
            if (b.bag.size() == static_cast<std::size_t>(width) + 1) b.remove(b.bag.front());
            b.intro(i);
        }
        b.td.root = b.cur;
        out.td = classify_modified(std::move(b.td));
        out.kind_counts = out.td.kind_counts();
        return out;
    }

    if (width < 2) throw InvalidArgument("infeasible: an FD with its attributes needs width >= 2");
    const int per_unit = width;  // z, width-2 x's, y
    if (static_cast<long>(n_att) < static_cast<long>(n_fd) * per_unit)
        throw InvalidArgument("infeasible: width " + std::to_string(width) + " needs at least " +
                              std::to_string(per_unit) + " attributes per FD");
    const int units = n_fd;
    const int extra = n_att - n_fd * per_unit;

    struct Unit {
        int z = 0, y = 0;
        std::vector<int> xs, extras;
        int fd = 0;
    };
    std::vector<Unit> u(static_cast<std::size_t>(units));
    auto& s = out.schema;
    for (int i = 0; i < units; ++i) {
        auto& un = u[static_cast<std::size_t>(i)];
        un.z = s.add_attribute("z" + std::to_string(i));
        for (int j = 1; j <= width - 2; ++j) un.xs.push_back(s.add_attribute("x" + std::to_string(i) + "_" + std::to_string(j)));
        un.y = s.add_attribute("y" + std::to_string(i));
    }
    for (int k = 0; k < extra; ++k) {
        auto& un = u[static_cast<std::size_t>(k % units)];
        un.extras.push_back(s.add_attribute("e" + std::to_string(k % units) + "_" + std::to_string(un.extras.size() + 1)));
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < units; ++i) {
        auto& un = u[static_cast<std::size_t>(i)];
        std::vector<int> atts = un.xs;
        atts.push_back(un.y);
        atts.push_back(i == 0 ? un.z : u[static_cast<std::size_t>((i - 1) / 2)].z);
        std::uniform_int_distribution<std::size_t> pick(0, atts.size() - 1);
        const auto r = pick(rng);
        const int rhs = atts[r];
        atts.erase(atts.begin() + static_cast<std::ptrdiff_t>(r));
        un.fd = s.add_fd(atts, rhs);
    }
    auto att = [&](int a) { return s.attribute_elem(a); };

    // depth-first expansion; b.cur ends on top of the unit's chain
    auto build = [&](auto&& self, int i) -> void {
        auto& un = u[static_cast<std::size_t>(i)];
        const int k1 = 2 * i + 1, k2 = 2 * i + 2;
        if (k1 >= units) {
            std::vector<ElemId> leaf{att(un.z)};
            if (i == 0)
                for (int x : un.xs) leaf.push_back(att(x));
            b.leaf(leaf);
        } else if (k2 >= units) {
            self(self, k1);
        } else {
            self(self, k1);
            const NodeId left = b.cur;
            self(self, k2);
            const NodeId right = b.cur;
            const auto branch = b.td.add_node(b.bag);
            b.td.attach(branch, left);
            b.td.attach(branch, right);
            b.cur = branch;
            b.step(branch);  // copy above the branch
        }
        for (int e : un.extras) {
            b.intro(att(e));
            b.remove(att(e));
        }
        const ElemId f = s.fd_elem(un.fd);
        if (i == 0) {
            if (k1 < units)
                for (int x : un.xs) b.intro(att(x));
            b.intro(att(un.y));
            b.intro(f);
            return;
        }
        const int zp = u[static_cast<std::size_t>((i - 1) / 2)].z;
        for (int x : un.xs) b.intro(att(x));
        b.intro(att(zp));
        b.remove(att(un.z));
        b.intro(att(un.y));
        b.intro(f);
        b.remove(f);
        for (int x : un.xs) b.remove(att(x));
        b.remove(att(un.y));
    };
    build(build, 0);
    b.td.root = b.cur;
    out.td = classify_modified(std::move(b.td));
    out.kind_counts = out.td.kind_counts();
    return out;
}

}  // namespace mdtw
