#include "versor/tasks/nbody.hpp"

#include <cmath>
#include <cstdio>

#include "versor/common/errors.hpp"

namespace versor::tasks {

namespace {

void check_config(const NBodyConfig& c) {
  if (c.n_bodies < 1 || c.epsilon <= 0 || c.dt <= 0 || c.steps < 2 ||
      c.heavy_mass <= 0 || c.light_mass <= 0)
    throw ContractError("nbody: invalid configuration");
}

// Softened pairwise accelerations, 3D force law restricted to the plane.
void accelerations(const Frame& f, std::span<const real> m, real g,
                   real epsilon, std::vector<std::array<real, 2>>& acc) {
  const int n = static_cast<int>(f.size());
  acc.assign(n, {real(0), real(0)});
  const real eps2 = epsilon * epsilon;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const real dx = f[j][0] - f[i][0];
      const real dy = f[j][1] - f[i][1];
      const real r2 = dx * dx + dy * dy + eps2;
      const real inv_r3 = real(1) / (r2 * std::sqrt(r2));
      const real s = g * inv_r3;
      acc[i][0] += s * m[j] * dx;
      acc[i][1] += s * m[j] * dy;
      acc[j][0] -= s * m[i] * dx;
      acc[j][1] -= s * m[i] * dy;
    }
}

struct Derivative {
  std::vector<std::array<real, 2>> dq, dv;
};

void derivative(const Frame& f, std::span<const real> m, real g, real epsilon,
                Derivative& d) {
  const int n = static_cast<int>(f.size());
  d.dq.resize(n);
  for (int i = 0; i < n; ++i) d.dq[i] = {f[i][2], f[i][3]};
  accelerations(f, m, g, epsilon, d.dv);
}

Frame advance(const Frame& f, const Derivative& d, real h) {
  Frame out = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i][0] += h * d.dq[i][0];
    out[i][1] += h * d.dq[i][1];
    out[i][2] += h * d.dv[i][0];
    out[i][3] += h * d.dv[i][1];
  }
  return out;
}

Frame sample_initial_frame(const NBodyConfig& c, Rng& rng) {
  Frame f(c.n_bodies, BodyState{0, 0, 0, 0});
  // Lights on staggered near-circular orbits around the heavy body at the
  // origin; radial separation keeps close encounters rare enough that the
  // drift gate almost never rejects.
  for (int k = 1; k < c.n_bodies; ++k) {
    const real r = real(1.6) + real(0.45) * (k - 1) + rng.uniform(-0.1, 0.1);
    const real th = rng.uniform(0.0, 6.283185307179586);
    const real v = std::sqrt(c.g * c.heavy_mass / r) * (real(1) + rng.uniform(-0.05, 0.05));
    f[k] = {r * std::cos(th), r * std::sin(th), -v * std::sin(th), v * std::cos(th)};
  }
  // The heavy body absorbs the recoil so total momentum starts at zero.
  real px = 0, py = 0;
  for (int k = 1; k < c.n_bodies; ++k) {
    px += c.light_mass * f[k][2];
    py += c.light_mass * f[k][3];
  }
  f[0][2] = -px / c.heavy_mass;
  f[0][3] = -py / c.heavy_mass;
  return f;
}

bool frame_finite(const Frame& f) {
  for (const auto& b : f)
    for (real v : b)
      if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

real potential_energy(const Frame& frame, std::span<const real> masses, real g,
                      real epsilon) {
  const int n = static_cast<int>(frame.size());
  const real eps2 = epsilon * epsilon;
  real v = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const real dx = frame[j][0] - frame[i][0];
      const real dy = frame[j][1] - frame[i][1];
      v -= g * masses[i] * masses[j] / std::sqrt(dx * dx + dy * dy + eps2);
    }
  return v;
}

real total_energy(const Frame& frame, std::span<const real> masses, real g,
                  real epsilon) {
  real t = 0;
  for (std::size_t i = 0; i < frame.size(); ++i)
    t += real(0.5) * masses[i] *
         (frame[i][2] * frame[i][2] + frame[i][3] * frame[i][3]);
  return t + potential_energy(frame, masses, g, epsilon);
}

Frame rk4_step(const Frame& frame, std::span<const real> masses, real g,
               real epsilon, real dt) {
  Derivative k1, k2, k3, k4;
  derivative(frame, masses, g, epsilon, k1);
  derivative(advance(frame, k1, dt / 2), masses, g, epsilon, k2);
  derivative(advance(frame, k2, dt / 2), masses, g, epsilon, k3);
  derivative(advance(frame, k3, dt), masses, g, epsilon, k4);

  Frame out = frame;
  const real h = dt / 6;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    out[i][0] += h * (k1.dq[i][0] + 2 * k2.dq[i][0] + 2 * k3.dq[i][0] + k4.dq[i][0]);
    out[i][1] += h * (k1.dq[i][1] + 2 * k2.dq[i][1] + 2 * k3.dq[i][1] + k4.dq[i][1]);
    out[i][2] += h * (k1.dv[i][0] + 2 * k2.dv[i][0] + 2 * k3.dv[i][0] + k4.dv[i][0]);
    out[i][3] += h * (k1.dv[i][1] + 2 * k2.dv[i][1] + 2 * k3.dv[i][1] + k4.dv[i][1]);
  }
  return out;
}

Trajectory rk4_integrate(const NBodyConfig& config) {
  check_config(config);
  const Rng base(config.seed);

  Trajectory traj;
  traj.masses.assign(config.n_bodies, config.light_mass);
  traj.masses[0] = config.heavy_mass;

  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = base.fork(attempt);
    traj.frames.clear();
    traj.frames.reserve(config.steps);
    traj.frames.push_back(sample_initial_frame(config, rng));

    bool ok = true;
    for (int t = 1; t < config.steps; ++t) {
      Frame next = rk4_step(traj.frames.back(), traj.masses, config.g,
                            config.epsilon, config.dt);
      if (!frame_finite(next)) {
        ok = false;
        break;
      }
      traj.frames.push_back(std::move(next));
    }
    if (ok && energy_drift(traj, config.g, config.epsilon) <= real(1)) return traj;
    std::fprintf(stderr,
                 "nbody: rejected candidate trajectory (seed %llu attempt %d)\n",
                 static_cast<unsigned long long>(config.seed), attempt);
  }
  throw ContractError("nbody: no acceptable trajectory after bounded retries");
}

std::vector<Trajectory> generate_dataset(const NBodyConfig& config) {
  check_config(config);
  std::vector<Trajectory> out;
  out.reserve(config.n_trajectories);
  for (int i = 0; i < config.n_trajectories; ++i) {
    NBodyConfig c = config;
    c.seed = Rng::derive_seed(config.seed, static_cast<std::uint64_t>(i));
    out.push_back(rk4_integrate(c));
  }
  return out;
}

real energy_drift(const Trajectory& traj, real g, real epsilon) {
  if (traj.frames.size() < 2)
    throw ContractError("energy_drift: need at least two frames");
  const real h0 = total_energy(traj.frames[0], traj.masses, g, epsilon);
  if (std::abs(h0) < real(1e-12))
    throw ContractError("energy_drift: reference energy is zero");
  real worst = 0;
  for (const Frame& f : traj.frames) {
    const real h = total_energy(f, traj.masses, g, epsilon);
    worst = std::max(worst, std::abs(h - h0));
  }
  return real(100) * worst / std::abs(h0);
}

}  // namespace versor::tasks
