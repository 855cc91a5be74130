#include "versor/model/init.hpp"

#include <cmath>

#include "versor/common/errors.hpp"

namespace versor::nn {

Matrix versor_init(int fan_in, int fan_out, Rng& rng) {
  if (fan_in <= 0 || fan_out <= 0)
    throw ContractError("versor_init: dimensions must be positive");
  const double sigma = std::sqrt(2.0 / (static_cast<double>(fan_in) * 32.0));
  Matrix w(fan_in, fan_out);
  for (auto& v : w.a) v = static_cast<real>(rng.normal(0.0, sigma));
  return w;
}

double versor_init_variance(int fan_in, double sigma_x2) {
  return static_cast<double>(fan_in) * (2.0 / (fan_in * 32.0)) * sigma_x2;
}

}  // namespace versor::nn
