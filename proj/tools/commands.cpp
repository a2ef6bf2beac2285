#include "commands.hpp"

#include "linmso/errors.hpp"
#include "linmso/oracle.hpp"
#include "linmso/problems.hpp"
#include "linmso/solver.hpp"
#include "linmso/treedec.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace linmso::cli {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

Structure load_graph(const std::string& path) {
    Graph g = parse_gr(read_file(path));
    return graph_to_structure(g.n, g.edges);
}

void print_stats(const SolveResult& r, std::ostream& out) {
    const auto& s = r.stats;
    out << std::fixed << std::setprecision(3);
    out << "nodes: " << s.nodes << "\n";
    out << "max cells: " << s.max_cells << "\n";
    out << "max entries per cell: " << s.max_entries << "\n";
    out << "max game size: " << s.max_game_size << "\n";
    out << "store nodes: " << s.store_nodes << "\n";
    for (int k = 0; k < 4; ++k)
        out << nice_kind_name(static_cast<NiceKind>(k)) << " time: " << s.seconds[k] << " s\n";
    out << "root time: " << s.root_seconds << " s\n";
}

int cmd_solve(const std::string& graph, const std::string& td_path, const std::string& problem, bool stats,
              std::ostream& out) {
    Structure a = load_graph(graph);
    Problem p = resolve_problem(problem);
    NiceTreeDecomposition ntd;
    if (!td_path.empty()) {
        TreeDecomposition td = parse_td(read_file(td_path));
        TdReport rep = validate_td(td, a);
        if (!rep.ok) throw InputError("invalid tree decomposition: " + rep.violations.front());
        if (a.size() > 0) ntd = nicify(td);
    } else if (a.size() > 0) {
        ntd = nicify(min_fill_td(a));
    }
    SolverOptions opts;
    opts.game_sizes = stats;
    Solver solver(p, opts);
    SolveResult r = solver.solve(a, ntd);
    out << "OPT = " << cost_to_string(user_value(p, r.opt)) << "\n";
    if (stats) {
        out << "width: " << ntd.width() << "\n";
        print_stats(r, out);
    }
    return 0;
}

int cmd_oracle(const std::string& graph, const std::string& problem, std::ostream& out) {
    Structure a = load_graph(graph);
    Problem p = resolve_problem(problem);
    out << "OPT = " << cost_to_string(user_value(p, brute_force_linmso(a, p))) << "\n";
    return 0;
}

int cmd_validate(const std::string& graph, const std::string& td_path, std::ostream& out) {
    Structure a = load_graph(graph);
    TreeDecomposition td = parse_td(read_file(td_path));
    TdReport rep = validate_td(td, a);
    if (rep.ok) {
        out << "ok\n";
        return 0;
    }
    for (const auto& v : rep.violations) out << v << "\n";
    return 1;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimization over MSO-definable problems on graphs of bounded treewidth", "linmso"};
    app.require_subcommand(1);

    std::string graph, td, problem;
    bool stats = false;
    auto* solve = app.add_subcommand("solve", "Solve a problem by dynamic programming over a tree decomposition");
    solve->add_option("--graph", graph, "Graph in .gr format")->required();
    solve->add_option("--td", td, "Tree decomposition in .td format (default: min-fill heuristic)");
    solve->add_option("--problem", problem, "vc, ds, 3col or a .mso file")->required();
    solve->add_flag("--stats", stats, "Print solver statistics");

    auto* oracle = app.add_subcommand("oracle", "Solve a small instance by exhaustive enumeration");
    oracle->add_option("--graph", graph, "Graph in .gr format")->required();
    oracle->add_option("--problem", problem, "vc, ds, 3col or a .mso file")->required();

    auto* validate = app.add_subcommand("validate", "Check a tree decomposition against a graph");
    validate->add_option("--graph", graph, "Graph in .gr format")->required();
    validate->add_option("--td", td, "Tree decomposition in .td format")->required();

    BenchOptions bo;
    auto* bench = app.add_subcommand("bench", "Run a benchmark suite and print CSV");
    bench->add_option("--suite", bo.suite, "grid or random")->check(CLI::IsMember({"grid", "random"}));
    bench->add_option("--problem", bo.problem, "vc, ds, 3col or a .mso file");
    bench->add_option("--seed", bo.seed, "Random seed");
    bench->add_option("--instances", bo.instances, "Number of instances")->check(CLI::NonNegativeNumber);
    bench->add_option("--rows", bo.rows, "Grid rows")->check(CLI::PositiveNumber);
    bench->add_option("--cols", bo.cols, "Grid columns")->check(CLI::PositiveNumber);
    bench->add_option("--keep", bo.keep, "Probability of keeping each grid edge")->check(CLI::Range(0.0, 1.0));
    bench->add_option("--n", bo.n, "Vertices of random graphs")->check(CLI::NonNegativeNumber);
    bench->add_option("--p", bo.p, "Edge probability of random graphs")->check(CLI::Range(0.0, 1.0));
    bench->add_flag("--timing", bo.timing, "Fill the time and memory columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*solve) return cmd_solve(graph, td, problem, stats, out);
        if (*oracle) return cmd_oracle(graph, problem, out);
        if (*validate) return cmd_validate(graph, td, out);
        if (*bench) {
            run_bench(bo, out);
            return 0;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvariantError& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return 1;
    }
    return 1;
}

} // namespace linmso::cli
