#pragma once

// Command-line orchestration: degeneracy check -> genericity plan ->
// seed/certify/solve -> verify -> report, emitted as JSON lines.
//
// Exit codes: 0 success, 2 mathematically degenerate input,
// 3 certification shortfall, 4 parse error, 1 other errors.

#include <iosfwd>
#include <string>
#include <vector>

namespace iets {

struct RunConfig {
    std::string subcommand;
    std::string inputPath;
    double tol = 1e-12;
    int rootCount = 3;
    int heightBound = 10;
    int digits = 30;
    long tMax = 1L << 14;
    int workers = 0;          // 0 = available parallelism / IETS_WORKERS
    bool serial = false;      // serial reference path
    std::string outPath;      // empty = stdout
    std::string plotPath;     // optional (Re z, Im z, residual) CSV
    std::string region;       // count-roots: x0,y0,x1,y1
    std::string rootArg;      // diagnose: re,im
};

int runCli(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and dispatches; used by the binary and by tests.
int runCliArgs(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace iets
