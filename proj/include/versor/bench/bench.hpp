#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "versor/common/real.hpp"

namespace versor::bench {

// One measured kernel configuration. Latencies are wall nanoseconds for a
// whole repetition (batch products back to back); op and byte figures are
// modeled from the kernel structure, not measured, and say so in the docs.
struct BenchReport {
  std::string engine;
  int batch = 0;
  int repetitions = 0;
  double median_ns = 0;
  double mean_ns = 0;
  double p95_ns = 0;
  std::uint64_t mad_count = 0;      // modeled ops per product
  std::uint64_t bytes_modeled = 0;  // modeled traffic per product
  double intensity = 0;             // mad_count / bytes_modeled
};

// Runs fn warmup + reps times on the calling thread and fills the latency
// fields from the per-repetition monotonic-clock times. reps is floored at 30
// so the median is meaningful.
BenchReport time_kernel(std::string engine, int batch, int reps,
                        const std::function<void()>& fn, int warmup = 5);

// Geometric-product microbenchmark. Engines: naive (table), bitmask,
// matrix-iso (multivector in, multivector out) and matrix-iso-core (operands
// pre-converted, 4x4 complex multiply only). engine_filter "" runs all four.
std::vector<BenchReport> bench_product(std::uint64_t seed,
                                       std::span<const int> batches,
                                       const std::string& engine_filter = "");

struct RraBenchPoint {
  int length = 0;
  double median_ns = 0;
  double mean_ns = 0;
  double p95_ns = 0;
};

struct RraBenchResult {
  std::vector<RraBenchPoint> points;
  // Least-squares slope of log(median_ns) against log(length).
  double slope = 0;
};

// Latency of the constant-memory recurrence scan across sequence lengths.
// Input rows are kept at small amplitude so deep scans stay on the manifold.
RraBenchResult bench_rra(std::uint64_t seed, std::span<const int> lengths,
                         int reps = 30);

// CSV serialization. Line 1 is a '#' comment carrying seed, config hash and
// artifact version; line 2 the header; then one row per report.
std::string product_csv(std::span<const BenchReport> reports,
                        std::uint64_t seed, const std::string& config_hash);
std::string rra_csv(const RraBenchResult& result, std::uint64_t seed,
                    const std::string& config_hash);

// Parses product_csv output back; used by round-trip tests. Throws
// ContractError on malformed input.
std::vector<BenchReport> parse_product_csv(const std::string& text);

double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace versor::bench
