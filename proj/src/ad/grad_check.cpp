#include "versor/ad/grad_check.hpp"

#include <cmath>

#include "versor/common/errors.hpp"

namespace versor::ad {

double grad_check(const DiffFn& f, std::span<const double> x) {
  const EvalResult at_x = f(x);
  if (at_x.grad.size() != x.size())
    throw ContractError("grad_check: gradient length mismatch");

  std::vector<double> probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x[i]));
    const double keep = probe[i];
    probe[i] = keep + h;
    const double above = f(probe).value;
    probe[i] = keep - h;
    const double below = f(probe).value;
    probe[i] = keep;
    const double fd = (above - below) / (2.0 * h);
    const double an = at_x.grad[i];
    const double rel =
        std::abs(fd - an) / (1e-6 + std::max(std::abs(fd), std::abs(an)));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace versor::ad
