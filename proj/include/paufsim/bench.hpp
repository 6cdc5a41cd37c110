#pragma once

#include "paufsim/common.hpp"

#include <cstdint>
#include <vector>

namespace paufsim {

struct LinearFit {
    double slope = 0;     // ms per byte
    double intercept = 0; // ms
    double r2 = 0;
};

// Least-squares y = slope*x + intercept over (x, y) samples.
LinearFit linear_fit(const std::vector<std::pair<double, double>>& samples);

struct BenchRow {
    std::uint64_t size = 0;
    double convert_ms = 0;
    double open_save_ms = 0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    int repetitions = 0;
    LinearFit convert_fit;
    LinearFit open_save_fit;
};

// Wall-clock cost of convert and of the open+save flow per file size
// (median of `reps` runs, fresh volume each). Absolute numbers are
// machine-specific; the linear fits are the meaningful output.
BenchResult run_bench(const std::vector<std::uint64_t>& sizes, int reps);

std::string bench_table(const BenchResult& r);

} // namespace paufsim
