#pragma once

#include <cstdint>
#include <vector>

#include "versor/algebra/signature.hpp"
#include "versor/common/real.hpp"

namespace versor {

// Blade pairs (p, q) whose product q-reversed lands on grade 2, i.e. the
// support of grade2(a * reverse(b)). The weight already folds in the
// reversion sign of q, and slot indexes the grade-2 masks in ascending order.
// This drives both the attention bivector map and its backward pass.
struct Grade2Pairs {
  struct Entry {
    std::uint32_t p, q;
    real w;
    int slot;
  };
  std::vector<std::uint32_t> masks;  // ascending grade-2 masks
  std::vector<Entry> entries;
};

Grade2Pairs build_grade2_pairs(const Signature& sig);

}  // namespace versor
