#pragma once

#include "versor/ad/tape.hpp"
#include "versor/common/rng.hpp"
#include "versor/model/matrix.hpp"

namespace versor::nn {

// Geometric product attention. Tokens are projected to multivectors and
// scored pairwise by the scalar part of Q_i reverse(K_j) plus a learned
// multiple of the grade-2 magnitude; higher grades are dropped from the
// score. Scores are scaled by 1/sqrt(d_in) before the row softmax.
struct GpaParams {
  Matrix wq, wk, wv;  // d_in x 32 each
  real gamma = real(0.5);

  static GpaParams init(int d_in, Rng& rng);
};

struct GpaResult {
  Matrix out;        // L x 32, attention-weighted values
  Matrix attention;  // L x L, rows sum to 1
  Matrix scalar_map;   // L x L, <Q_i reverse(K_j)>_0
  Matrix bivector_map; // L x L, |grade2(Q_i reverse(K_j))|
};

GpaResult gpa_forward(const Matrix& features, const GpaParams& params);

// Same computation recorded on a tape. Output node is L x 32; leaves expose
// the parameter gradients.
struct GpaGraph {
  ad::NodeId wq, wk, wv, gamma;
  ad::NodeId attention;
  ad::NodeId out;
};

GpaGraph gpa_build_graph(ad::Tape& tape, const Matrix& features,
                         const GpaParams& params);

}  // namespace versor::nn
