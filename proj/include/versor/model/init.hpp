#pragma once

#include "versor/common/rng.hpp"
#include "versor/model/matrix.hpp"

namespace versor::nn {

// Weight initialization for layers feeding multivector space: entries drawn
// from N(0, 2 / (fan_in * 32)). The extra 1/32 keeps the coefficient variance
// flat after a full geometric product, where every output blade accumulates
// contributions from all 32 input blades.
Matrix versor_init(int fan_in, int fan_out, Rng& rng);

// Predicted per-entry output variance of y = x W under this scheme, for
// inputs with variance sigma_x2.
double versor_init_variance(int fan_in, double sigma_x2);

}  // namespace versor::nn
