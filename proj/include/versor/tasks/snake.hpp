#pragma once

#include <array>
#include <span>
#include <vector>

#include "versor/common/rng.hpp"

namespace versor::tasks {

enum class SnakeLabel { kConnected, kBroken };

// Self-avoiding 8-adjacent pixel path on a grid x grid board. A broken sample
// has exactly one interior pixel removed, chosen so the surviving neighbors
// are not themselves adjacent; gap_index is the position in the stored path
// of the first pixel after the gap (-1 when intact).
struct SnakeSample {
  int grid = 0;
  std::vector<std::array<int, 2>> path;  // (row, col)
  SnakeLabel label = SnakeLabel::kConnected;
  int gap_index = -1;
};

// Random walk of length >= grid. Throws after bounded retries if the walk
// keeps dead-ending (practically impossible for grid >= 8).
SnakeSample gen_snake(int grid, bool broken, Rng& rng);

// Connectivity from the algebra alone: each consecutive displacement is fed
// through the conformal translator and its translation-bivector coefficients
// are read back. A unit step leaves every recovered component at most 1; any
// larger component certifies separation. The rule sees only local
// displacements, so it is identical at every grid size.
SnakeLabel snake_connectivity_algebraic(const SnakeSample& sample);

// Matthews correlation over binary labels, 0 when a marginal is degenerate.
double mcc(std::span<const SnakeLabel> predictions,
           std::span<const SnakeLabel> labels);

}  // namespace versor::tasks
