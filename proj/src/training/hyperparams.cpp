#include "fedsynth/training/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fedsynth/errors.hpp"

namespace fedsynth {

void Hyperparams::validate() const {
  if (total_epochs < 1) throw ValidationError("total_epochs must be >= 1");
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) {
    throw ValidationError("initial_lr must be > 0");
  }
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(l1_weight >= 0.0)) throw ValidationError("l1_weight must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ValidationError("optimizer betas must lie in [0, 1)");
  }
}

double lr_schedule(std::int64_t epoch, const Hyperparams& hyper) {
  if (epoch < 0 || epoch >= hyper.total_epochs) {
    throw ValidationError("epoch " + std::to_string(epoch) + " outside [0, " +
                          std::to_string(hyper.total_epochs) + ")");
  }
  const auto total = static_cast<double>(hyper.total_epochs);
  switch (hyper.decay) {
    case LrDecay::linear:
      return hyper.initial_lr * static_cast<double>(hyper.total_epochs - epoch) / total;
    case LrDecay::constant_then_linear: {
      const std::int64_t constant = hyper.total_epochs / 2;
      const auto decay_epochs = static_cast<double>(hyper.total_epochs - constant);
      const auto into_decay = static_cast<double>(std::max<std::int64_t>(0, epoch - constant));
      return hyper.initial_lr * (decay_epochs - into_decay) / decay_epochs;
    }
  }
  return hyper.initial_lr;
}

std::string format_epoch_csv(const EpochStats& s) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,%.9g,%.9g", static_cast<long long>(s.epoch),
                s.lr_used, s.mean_g_loss, s.mean_d_loss, s.mean_l1);
  return buf;
}

}  // namespace fedsynth
