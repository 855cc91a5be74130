#include "versor/model/train.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "versor/ad/tape.hpp"
#include "versor/algebra/signature.hpp"
#include "versor/common/errors.hpp"

namespace versor::nn {

namespace {

struct AdamSlot {
  Matrix* w;
  std::vector<double> m, v, gsum;

  explicit AdamSlot(Matrix* mat)
      : w(mat), m(mat->size(), 0), v(mat->size(), 0), gsum(mat->size(), 0) {}
};

}  // namespace

TrainResult train_rra(RraParams& params, const std::vector<Sequence>& data,
                      const TrainConfig& config) {
  if (data.empty()) throw ContractError("train_rra: empty dataset");
  if (config.epochs < 0 || config.batch < 1)
    throw ContractError("train_rra: invalid config");

  TrainResult result;
  std::vector<AdamSlot> slots;
  slots.emplace_back(&params.lift);
  slots.emplace_back(&params.w_bivector);
  slots.emplace_back(&params.readout);

  const RraOptions opts{config.normalize};
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  Rng rng(config.seed);
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  long adam_t = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const real lr =
        config.cosine_schedule
            ? config.lr * real(0.5) *
                  (real(1) + std::cos(real(3.14159265358979324) * epoch /
                                      std::max(1, config.epochs)))
            : config.lr;
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(0, i)]);

    double loss_sum = 0;
    int loss_count = 0;
    for (std::size_t pos = 0; pos < order.size();) {
      const std::size_t batch_end = std::min(order.size(), pos + config.batch);
      const double batch_n = static_cast<double>(batch_end - pos);
      for (auto& s : slots) std::fill(s.gsum.begin(), s.gsum.end(), 0.0);

      for (; pos < batch_end; ++pos) {
        const Sequence& seq = data[order[pos]];
        double lv = std::numeric_limits<double>::quiet_NaN();
        try {
          ad::Tape tape(cl41());
          RraGraph g = rra_build_graph(tape, seq.features, params, opts);
          const ad::NodeId tgt =
              tape.constant(seq.targets.a, seq.targets.rows, seq.targets.cols);
          const ad::NodeId loss = tape.mse(g.predictions, tgt);
          lv = tape.scalar_val(loss);
          if (std::isfinite(lv)) {
            tape.backward(loss);
            const ad::NodeId ids[3] = {g.lift, g.w_bivector, g.readout};
            for (int s = 0; s < 3; ++s) {
              const auto& gr = tape.grad(ids[s]);
              for (std::size_t k = 0; k < gr.size(); ++k)
                slots[s].gsum[k] += gr[k];
            }
          }
        } catch (const CayleySingularError&) {
          // Scan left the trustworthy region: same divergence event as a
          // non-finite loss, lv stays NaN.
        } catch (const DegenerateStateError&) {
        }
        if (!std::isfinite(lv)) {
          result.epoch_mse.push_back(
              std::numeric_limits<real>::quiet_NaN());
          result.diverged_epoch = epoch;
          if (config.log_progress)
            std::fprintf(stderr, "train: diverged at epoch %d\n", epoch);
          return result;
        }
        loss_sum += lv;
        ++loss_count;
      }

      ++adam_t;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_t));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_t));
      for (auto& s : slots)
        for (std::size_t k = 0; k < s.gsum.size(); ++k) {
          const double g = s.gsum[k] / batch_n;
          s.m[k] = kBeta1 * s.m[k] + (1.0 - kBeta1) * g;
          s.v[k] = kBeta2 * s.v[k] + (1.0 - kBeta2) * g * g;
          const double update = (s.m[k] / c1) / (std::sqrt(s.v[k] / c2) + kEps);
          s.w->a[k] -= lr * static_cast<real>(update +
                                              config.weight_decay * s.w->a[k]);
        }
    }

    result.epoch_mse.push_back(
        static_cast<real>(loss_sum / std::max(1, loss_count)));
    if (config.log_progress)
      std::fprintf(stderr, "train: epoch %d mse %.6f lr %.2e\n", epoch,
                   result.epoch_mse.back(), static_cast<double>(lr));
  }
  return result;
}

}  // namespace versor::nn
