#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "versor/common/real.hpp"
#include "versor/common/rng.hpp"

namespace versor::tasks {

// Planar gravitational N-body with softened 1/r potential. One heavy central
// mass plus lighter bodies on near-circular orbits; ground truth integrated
// with classic RK4.
struct NBodyConfig {
  int n_bodies = 5;
  real g = real(1);
  real epsilon = real(1e-3);  // softening length
  real dt = real(0.01);
  int steps = 100;  // frames per trajectory, including the initial one
  int n_trajectories = 50;
  real heavy_mass = real(10);
  real light_mass = real(1);
  std::uint64_t seed = 1;
};

// Per-body state (x, y, vx, vy); a frame is one row per body.
using BodyState = std::array<real, 4>;
using Frame = std::vector<BodyState>;

struct Trajectory {
  std::vector<real> masses;
  std::vector<Frame> frames;
};

// V = -sum_{i<j} G m_i m_j / sqrt(|q_i - q_j|^2 + eps^2). The softening keeps
// close encounters finite: each pair is bounded below by -G m_i m_j / eps.
real potential_energy(const Frame& frame, std::span<const real> masses, real g,
                      real epsilon);

// H = sum_i m_i |v_i|^2 / 2 + V.
real total_energy(const Frame& frame, std::span<const real> masses, real g,
                  real epsilon);

// One RK4 step of the softened equations of motion.
Frame rk4_step(const Frame& frame, std::span<const real> masses, real g,
               real epsilon, real dt);

// Integrates one trajectory from sampled initial conditions. Initial frames
// have exactly balanced momentum; candidates whose ground-truth energy drift
// exceeds 1% (or that go non-finite) are rejected and resampled from a fresh
// sub-stream, with the rejection logged to stderr.
Trajectory rk4_integrate(const NBodyConfig& config);

// n_trajectories independent trajectories with per-item derived seeds.
std::vector<Trajectory> generate_dataset(const NBodyConfig& config);

// 100 * max_t |H_t - H_0| / |H_0|, in percent.
real energy_drift(const Trajectory& traj, real g, real epsilon);

}  // namespace versor::tasks
