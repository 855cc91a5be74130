#include "versor/model/nbody_model.hpp"

#include <cmath>
#include <deque>

#include "versor/common/errors.hpp"

namespace versor::nn {

namespace {

void check_dataset(const std::vector<tasks::Trajectory>& dataset,
                   const NBodyModelConfig& c) {
  if (dataset.empty()) throw ContractError("nbody model: empty dataset");
  for (const auto& t : dataset) {
    if (static_cast<int>(t.masses.size()) != c.n_bodies)
      throw ContractError("nbody model: body count mismatch");
    if (static_cast<int>(t.frames.size()) < c.window + 1)
      throw ContractError("nbody model: trajectory shorter than one window");
  }
}

// Frame flattened body-major: x, y, vx, vy per body.
void flatten(const tasks::Frame& f, std::span<real> out) {
  for (std::size_t b = 0; b < f.size(); ++b)
    for (int k = 0; k < 4; ++k) out[b * 4 + k] = f[b][k];
}

}  // namespace

NBodyModel make_nbody_model(const NBodyModelConfig& config, Rng& rng) {
  NBodyModel m;
  m.config = config;
  m.params = RraParams::init(config.d_in(), config.d_out(), rng);
  m.feature_std.mean.assign(config.frame_dim(), real(0));
  m.feature_std.stddev.assign(config.frame_dim(), real(1));
  m.target_std.mean.assign(config.frame_dim(), real(0));
  m.target_std.stddev.assign(config.frame_dim(), real(1));
  return m;
}

void fit_standardizers(const std::vector<tasks::Trajectory>& dataset,
                       NBodyModel& model) {
  const NBodyModelConfig& c = model.config;
  check_dataset(dataset, c);
  const int d = c.frame_dim();

  const auto fit = [d](Standardizer& s, const std::vector<double>& sum,
                       const std::vector<double>& sum2, double n) {
    s.mean.resize(d);
    s.stddev.resize(d);
    for (int k = 0; k < d; ++k) {
      s.mean[k] = static_cast<real>(sum[k] / n);
      const double var = sum2[k] / n - (sum[k] / n) * (sum[k] / n);
      s.stddev[k] = var > 1e-24 ? static_cast<real>(std::sqrt(var)) : real(1);
    }
  };

  std::vector<double> fs(d, 0), fs2(d, 0), ts(d, 0), ts2(d, 0);
  double fn = 0, tn = 0;
  std::vector<real> buf(d), next(d);
  for (const auto& traj : dataset) {
    for (std::size_t t = 0; t < traj.frames.size(); ++t) {
      flatten(traj.frames[t], buf);
      for (int k = 0; k < d; ++k) {
        fs[k] += buf[k];
        fs2[k] += static_cast<double>(buf[k]) * buf[k];
      }
      fn += 1;
      if (t + 1 < traj.frames.size()) {
        flatten(traj.frames[t + 1], next);
        for (int k = 0; k < d; ++k) {
          const double dv = static_cast<double>(next[k]) - buf[k];
          ts[k] += dv;
          ts2[k] += dv * dv;
        }
        tn += 1;
      }
    }
  }
  fit(model.feature_std, fs, fs2, fn);
  fit(model.target_std, ts, ts2, tn);
}

std::vector<Sequence> build_sequences(
    const std::vector<tasks::Trajectory>& dataset, const NBodyModel& model) {
  const NBodyModelConfig& c = model.config;
  check_dataset(dataset, c);
  const int d = c.frame_dim();
  const int w = c.window;

  std::vector<Sequence> out;
  std::vector<real> raw(d), nxt(d);
  for (const auto& traj : dataset) {
    // Scan step s predicts the delta from frame s+w-1 to frame s+w.
    const int n_steps = static_cast<int>(traj.frames.size()) - w;
    for (int start = 0; start < n_steps;) {
      const int len = std::min(c.segment_len, n_steps - start);
      Sequence seq;
      seq.features = Matrix(len, c.d_in());
      seq.targets = Matrix(len, d);
      for (int s = 0; s < len; ++s) {
        const int t0 = start + s;  // oldest frame of this window
        for (int slot = 0; slot < w; ++slot) {
          flatten(traj.frames[t0 + slot], raw);
          for (int k = 0; k < d; ++k)
            seq.features.at(s, slot * d + k) = model.feature_std.apply(raw[k], k);
        }
        flatten(traj.frames[t0 + w - 1], raw);
        flatten(traj.frames[t0 + w], nxt);
        for (int k = 0; k < d; ++k)
          seq.targets.at(s, k) = model.target_std.apply(nxt[k] - raw[k], k);
      }
      out.push_back(std::move(seq));
      if (start + len >= n_steps) break;
      start += c.segment_stride;
    }
  }
  return out;
}

std::vector<tasks::Frame> rollout(const NBodyModel& model,
                                  std::span<const tasks::Frame> initial_window,
                                  int horizon) {
  const NBodyModelConfig& c = model.config;
  if (static_cast<int>(initial_window.size()) < c.window)
    throw ContractError("rollout: initial window too short");
  if (horizon < 1) throw ContractError("rollout: horizon must be positive");
  const int d = c.frame_dim();

  std::deque<tasks::Frame> window(initial_window.end() - c.window,
                                  initial_window.end());
  RraScanner scan(model.params);
  std::vector<real> features(c.d_in()), raw(d);
  std::vector<tasks::Frame> predicted;
  predicted.reserve(horizon);

  for (int h = 0; h < horizon; ++h) {
    for (int slot = 0; slot < c.window; ++slot) {
      flatten(window[slot], raw);
      for (int k = 0; k < d; ++k)
        features[slot * d + k] = model.feature_std.apply(raw[k], k);
    }
    scan.step(features);
    const std::vector<real> delta = scan.predict();

    tasks::Frame next = window.back();
    for (int b = 0; b < c.n_bodies; ++b)
      for (int k = 0; k < 4; ++k)
        next[b][k] += model.target_std.invert(delta[b * 4 + k], b * 4 + k);
    predicted.push_back(next);
    window.pop_front();
    window.push_back(std::move(next));
  }
  return predicted;
}

real frames_mse(std::span<const tasks::Frame> a, std::span<const tasks::Frame> b) {
  if (a.size() != b.size() || a.empty())
    throw ContractError("frames_mse: length mismatch");
  double acc = 0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].size() != b[t].size()) throw ContractError("frames_mse: body mismatch");
    for (std::size_t i = 0; i < a[t].size(); ++i)
      for (int k = 0; k < 4; ++k) {
        const double dv = a[t][i][k] - b[t][i][k];
        acc += dv * dv;
        ++count;
      }
  }
  return static_cast<real>(acc / static_cast<double>(count));
}

}  // namespace versor::nn
