#pragma once

#include <functional>
#include <span>
#include <vector>

#include "versor/common/real.hpp"

namespace versor::ad {

struct EvalResult {
  double value = 0.0;
  std::vector<double> grad;  // same length as the parameter vector
};

using DiffFn = std::function<EvalResult(std::span<const double>)>;

// Central-difference check of an analytic gradient. Steps h = 1e-6 * (1 +
// |x_i|) per coordinate; returns the worst relative error
// |fd - an| / (1e-6 + max(|fd|, |an|)).
double grad_check(const DiffFn& f, std::span<const double> x);

}  // namespace versor::ad
