#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace versor::bench {

struct SelfCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  // Negative-control hook: flips one entry of the product table used by the
  // engine-equivalence check, which must then fail by name.
  bool corrupt_cayley = false;
};

// Runs every module's invariant suite at reduced sample counts. Checks are
// independent: a failure records its detail and the suite keeps going.
std::vector<SelfCheck> run_selftest(const SelftestOptions& opts = {});

// Name of the first failed check, or empty when all passed.
std::string first_failure(std::span<const SelfCheck> checks);

// Machine-readable summary: version, seed, totals, first failure, and one
// entry per check.
std::string selftest_json(std::span<const SelfCheck> checks,
                          const SelftestOptions& opts);

}  // namespace versor::bench
