#pragma once

#include <span>
#include <vector>

#include "versor/common/rng.hpp"
#include "versor/model/matrix.hpp"
#include "versor/model/rra.hpp"
#include "versor/tasks/nbody.hpp"

namespace versor::nn {

// Dynamics model for the planar N-body task. Each scan input is a sliding
// window of standardized frames; the recurrent rotor state is read out as the
// standardized per-body state delta to the next frame. Feeding predictions
// back through the window gives autoregressive rollout.
struct NBodyModelConfig {
  int window = 9;
  int n_bodies = 5;
  // Training sequences are trajectory segments; short segments keep the
  // accumulated state anchored near the frames it has to explain.
  int segment_len = 24;
  int segment_stride = 12;

  int frame_dim() const { return n_bodies * 4; }
  int d_in() const { return window * frame_dim(); }
  int d_out() const { return frame_dim(); }
};

// Per-component affine normalization, stored with the parameters so any
// checkpoint carries its own scales.
struct Standardizer {
  std::vector<real> mean, stddev;

  real apply(real v, int c) const { return (v - mean[c]) / stddev[c]; }
  real invert(real v, int c) const { return v * stddev[c] + mean[c]; }
};

struct NBodyModel {
  NBodyModelConfig config;
  RraParams params;
  Standardizer feature_std;  // frame_dim components, shared by window slots
  Standardizer target_std;   // frame_dim components of the frame delta
};

NBodyModel make_nbody_model(const NBodyModelConfig& config, Rng& rng);

// One training sequence: features L x d_in, targets L x d_out.
struct Sequence {
  Matrix features, targets;
};

// Fits both standardizers over every frame (respectively every frame delta)
// of the dataset. Degenerate components fall back to unit scale.
void fit_standardizers(const std::vector<tasks::Trajectory>& dataset,
                       NBodyModel& model);

// Segments every trajectory into standardized windowed sequences. Requires
// fitted standardizers.
std::vector<Sequence> build_sequences(
    const std::vector<tasks::Trajectory>& dataset, const NBodyModel& model);

// Autoregressive rollout: seeds the recurrence with the first window frames
// and integrates predicted deltas for `horizon` further frames. Returns only
// the predicted frames.
std::vector<tasks::Frame> rollout(const NBodyModel& model,
                                  std::span<const tasks::Frame> initial_window,
                                  int horizon);

// Mean squared error between two equally long frame lists, in raw units.
real frames_mse(std::span<const tasks::Frame> a, std::span<const tasks::Frame> b);

}  // namespace versor::nn
