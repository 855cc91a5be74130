#pragma once

#include <span>
#include <vector>

#include "versor/ad/tape.hpp"
#include "versor/algebra/multivector.hpp"
#include "versor/common/rng.hpp"
#include "versor/model/matrix.hpp"

namespace versor::nn {

// Recurrent rotor accumulator. Each input row is projected to a bivector,
// mapped through the Cayley transform to a rotor increment, and composed into
// the running state by left multiplication:
//   psi_t = normalize(cayley(B_t) * psi_{t-1}),  psi_0 = 1.
// One pass is O(L) products with O(1) live state.
struct RraParams {
  Matrix lift;        // d_in x 32
  Matrix w_bivector;  // 32 x 10
  Matrix readout;     // 32 x d_out

  static RraParams init(int d_in, int d_out, Rng& rng);
  std::size_t parameter_count() const {
    return lift.size() + w_bivector.size() + readout.size();
  }
};

struct RraOptions {
  // Skipping renormalization is only meant for ablation studies; the scan
  // then walks off the rotor manifold.
  bool normalize = true;
};

struct RraResult {
  Matrix states;       // L x 32, psi_1 .. psi_L
  Matrix predictions;  // L x d_out, states * readout
};

RraResult rra_forward(const Matrix& features, const RraParams& params,
                      const RraOptions& opts = {});

// Incremental form of the same scan, for feeding inputs one step at a time
// (autoregressive rollout and constant-memory benchmarking).
class RraScanner {
 public:
  RraScanner(const RraParams& params, RraOptions opts = {});

  // Advances the recurrence by one input row of width lift.rows.
  void step(std::span<const real> feature_row);

  const Multivector& state() const { return psi_; }
  int steps_taken() const { return step_; }

  // state * readout, one value per output column.
  std::vector<real> predict() const;

 private:
  const RraParams& params_;
  RraOptions opts_;
  Multivector psi_;
  int step_ = 0;
};

// The same recurrence over externally supplied rotor increments; used to
// probe the manifold scan in isolation.
std::vector<Multivector> rra_scan_rotors(std::span<const Multivector> deltas,
                                         bool normalize = true);

// Scan without storing per-step output: returns a checksum folding every
// state's scalar coefficient, keeping only O(1) live memory. Used by latency
// benchmarks so measured time is the recurrence itself.
real rra_checksum_scan(const Matrix& features, const RraParams& params,
                       const RraOptions& opts = {});

// Training graph: full scan plus readout recorded on the tape.
struct RraGraph {
  ad::NodeId lift, w_bivector, readout;
  ad::NodeId states;       // L x 32
  ad::NodeId predictions;  // L x d_out
};

RraGraph rra_build_graph(ad::Tape& tape, const Matrix& features,
                         const RraParams& params, const RraOptions& opts = {});

}  // namespace versor::nn
