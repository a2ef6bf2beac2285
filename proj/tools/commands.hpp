#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace linmso::cli {

struct BenchOptions {
    std::string suite = "grid"; // grid | random
    std::string problem = "vc";
    uint64_t seed = 0;
    int instances = 5;
    int rows = 2;
    int cols = 10;
    double keep = 1.0;
    int n = 200;
    double p = 0.01;
    bool timing = false;
};

// Writes the CSV for one benchmark run.
void run_bench(const BenchOptions& opts, std::ostream& out);

// Entry point of the command-line tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string read_file(const std::string& path);

} // namespace linmso::cli
