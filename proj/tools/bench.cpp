#include "commands.hpp"

#include "linmso/errors.hpp"
#include "linmso/problems.hpp"
#include "linmso/solver.hpp"
#include "linmso/treedec.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace linmso::cli {

namespace {

// Uniform draw in [0, 1) from the raw engine bits, independent of the
// standard library's distribution implementations.
bool bernoulli(std::mt19937_64& rng, double q) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return u < q;
}

Graph grid_graph(int rows, int cols, double keep, std::mt19937_64& rng) {
    Graph g;
    g.n = rows * cols;
    auto id = [&](int r, int c) { return c * rows + r + 1; };
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) {
            if (r + 1 < rows && bernoulli(rng, keep)) g.edges.emplace_back(id(r, c), id(r + 1, c));
            if (c + 1 < cols && bernoulli(rng, keep)) g.edges.emplace_back(id(r, c), id(r, c + 1));
        }
    return g;
}

Graph random_graph(int n, double p, std::mt19937_64& rng) {
    Graph g;
    g.n = n;
    for (int u = 1; u <= n; ++u)
        for (int v = u + 1; v <= n; ++v)
            if (bernoulli(rng, p)) g.edges.emplace_back(u, v);
    return g;
}

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

// Peak resident set size in MB, where /proc exposes it.
double peak_rss_mb() {
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("VmHWM:", 0) == 0) {
            std::istringstream s(line.substr(6));
            double kb = 0;
            s >> kb;
            return kb / 1024.0;
        }
    return -1;
}

} // namespace

void run_bench(const BenchOptions& o, std::ostream& out) {
    if (o.suite != "grid" && o.suite != "random") throw InputError("unknown suite '" + o.suite + "'");
    if (o.suite == "grid" && (o.rows < 1 || o.cols < 1)) throw InputError("grid dimensions must be positive");
    if (o.keep < 0 || o.keep > 1 || o.p < 0 || o.p > 1) throw InputError("probabilities must lie in [0, 1]");
    if (o.n < 0 || o.instances < 0) throw InputError("counts must be non-negative");
    Problem prob = resolve_problem(o.problem);
    Solver solver(prob);

    if (o.timing) out << "# time_s is wall clock; mem_mb is approximate (peak resident set)\n";
    out << "name,generator,seed,n,m,width,opt,time_s,mem_mb\n";
    for (int i = 0; i < o.instances; ++i) {
        uint64_t seed = o.seed + static_cast<uint64_t>(i);
        std::mt19937_64 rng(seed);
        Graph g;
        std::string name, gen;
        if (o.suite == "grid") {
            g = grid_graph(o.rows, o.cols, o.keep, rng);
            name = "grid-" + std::to_string(o.rows) + "x" + std::to_string(o.cols) + "-" + std::to_string(i);
            gen = "grid:" + std::to_string(o.rows) + "x" + std::to_string(o.cols) + ":keep=" + fmt(o.keep);
        } else {
            g = random_graph(o.n, o.p, rng);
            name = "random-" + std::to_string(o.n) + "-" + std::to_string(i);
            gen = "gnp:n=" + std::to_string(o.n) + ":p=" + fmt(o.p);
        }
        Structure a = graph_to_structure(g.n, g.edges);
        auto t0 = std::chrono::steady_clock::now();
        TreeDecomposition td = o.suite == "grid" ? grid_path_td(o.rows, o.cols) : min_fill_td(a);
        NiceTreeDecomposition ntd;
        if (g.n > 0) ntd = nicify(td);
        Cost opt = solver.solve(a, ntd).opt;
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        out << name << ',' << gen << ',' << seed << ',' << g.n << ',' << g.edges.size() << ',' << td.width() << ','
            << cost_to_string(user_value(prob, opt)) << ',';
        if (o.timing) {
            out << std::fixed << std::setprecision(3) << secs << ',' << std::setprecision(1) << peak_rss_mb();
            out << std::defaultfloat;
        } else {
            out << "NA,NA";
        }
        out << '\n';
    }
}

} // namespace linmso::cli
