#pragma once

#include <cstdint>
#include <vector>

#include "versor/common/rng.hpp"
#include "versor/model/nbody_model.hpp"
#include "versor/model/rra.hpp"

namespace versor::nn {

struct TrainConfig {
  int epochs = 200;
  int batch = 16;
  real lr = real(3e-4);
  real weight_decay = real(0.01);
  bool cosine_schedule = true;
  // Ablation switch: false removes manifold normalization from the scan.
  bool normalize = true;
  std::uint64_t seed = 0;
  bool log_progress = false;  // one stderr line per epoch
};

struct TrainResult {
  std::vector<real> epoch_mse;  // teacher-forcing loss per completed epoch
  // Epoch at which the loss stopped being finite, -1 for a clean run.
  int diverged_epoch = -1;
};

// AdamW over the three RRA weight matrices; sequences are visited in a
// seed-determined shuffle, gradients averaged per batch. Stops early when
// the loss leaves the finite range instead of throwing.
TrainResult train_rra(RraParams& params, const std::vector<Sequence>& data,
                      const TrainConfig& config);

}  // namespace versor::nn
