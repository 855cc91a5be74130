#include "versor/tasks/snake.hpp"

#include <algorithm>
#include <cmath>

#include "versor/common/errors.hpp"
#include "versor/conformal/conformal.hpp"

namespace versor::tasks {

namespace {

constexpr std::array<std::array<int, 2>, 8> kNeighbors = {{{-1, -1},
                                                           {-1, 0},
                                                           {-1, 1},
                                                           {0, -1},
                                                           {0, 1},
                                                           {1, -1},
                                                           {1, 0},
                                                           {1, 1}}};

bool try_walk(int grid, int target_len, Rng& rng,
              std::vector<std::array<int, 2>>& path) {
  std::vector<char> visited(static_cast<std::size_t>(grid) * grid, 0);
  path.clear();
  int r = static_cast<int>(rng.uniform_int(0, grid - 1));
  int c = static_cast<int>(rng.uniform_int(0, grid - 1));
  path.push_back({r, c});
  visited[static_cast<std::size_t>(r) * grid + c] = 1;

  std::array<int, 8> order{0, 1, 2, 3, 4, 5, 6, 7};
  while (static_cast<int>(path.size()) < target_len) {
    for (int i = 7; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(0, i)]);
    bool moved = false;
    for (int i : order) {
      const int nr = r + kNeighbors[i][0];
      const int nc = c + kNeighbors[i][1];
      if (nr < 0 || nr >= grid || nc < 0 || nc >= grid) continue;
      if (visited[static_cast<std::size_t>(nr) * grid + nc]) continue;
      r = nr;
      c = nc;
      path.push_back({r, c});
      visited[static_cast<std::size_t>(r) * grid + c] = 1;
      moved = true;
      break;
    }
    if (!moved) return false;  // dead end
  }
  return true;
}

int chebyshev(const std::array<int, 2>& a, const std::array<int, 2>& b) {
  return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
}

}  // namespace

SnakeSample gen_snake(int grid, bool broken, Rng& rng) {
  if (grid < 8) throw ContractError("gen_snake: grid must be at least 8");
  constexpr int kMaxAttempts = 200;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const int target = grid + static_cast<int>(rng.uniform_int(0, grid));
    SnakeSample s;
    s.grid = grid;
    if (!try_walk(grid, target, rng, s.path)) continue;

    if (!broken) return s;

    // Removable pixels: interior, and the flanking pixels must end up more
    // than one step apart, otherwise deleting the pixel leaves the path
    // connected and the label would lie.
    std::vector<int> candidates;
    for (int i = 1; i + 1 < static_cast<int>(s.path.size()); ++i)
      if (chebyshev(s.path[i - 1], s.path[i + 1]) >= 2) candidates.push_back(i);
    if (candidates.empty()) continue;

    const int pick =
        candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
    s.path.erase(s.path.begin() + pick);
    s.label = SnakeLabel::kBroken;
    s.gap_index = pick;  // first pixel after the gap in the stored path
    return s;
  }
  throw ContractError("gen_snake: walk generation failed after bounded retries");
}

SnakeLabel snake_connectivity_algebraic(const SnakeSample& sample) {
  if (sample.path.empty())
    throw ContractError("snake_connectivity_algebraic: empty path");
  for (std::size_t i = 1; i < sample.path.size(); ++i) {
    const real dr = static_cast<real>(sample.path[i][0] - sample.path[i - 1][0]);
    const real dc = static_cast<real>(sample.path[i][1] - sample.path[i - 1][1]);
    // The translator encodes the displacement as -t/2 on each e_i e+ / e_i e-
    // blade; recover the components and apply the max-norm adjacency rule.
    const std::array<real, 3> t{dr, dc, real(0)};
    const Multivector tr = cga::translator(t).mv();
    const real rx = real(-2) * tr[(1u << 0) | (1u << 3)];
    const real ry = real(-2) * tr[(1u << 1) | (1u << 3)];
    // Integer displacements are exact in floating point, so > 1 is the same
    // test as >= 2.
    if (std::max(std::abs(rx), std::abs(ry)) > real(1))
      return SnakeLabel::kBroken;
  }
  return SnakeLabel::kConnected;
}

double mcc(std::span<const SnakeLabel> predictions,
           std::span<const SnakeLabel> labels) {
  if (predictions.size() != labels.size())
    throw ContractError("mcc: length mismatch");
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == SnakeLabel::kBroken;
    const bool y = labels[i] == SnakeLabel::kBroken;
    if (p && y)
      ++tp;
    else if (!p && !y)
      ++tn;
    else if (p && !y)
      ++fp;
    else
      ++fn;
  }
  const double denom =
      (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

}  // namespace versor::tasks
