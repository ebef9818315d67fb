#pragma once

#include <cstdint>
#include <string>

namespace fedsynth {

enum class LrDecay {
  /// initial_lr * (1 - epoch / total_epochs) from the first epoch on.
  linear,
  /// Constant for the first half, then linear towards zero.
  constant_then_linear,
};

struct Hyperparams {
  std::int64_t total_epochs = 200;
  double initial_lr = 5e-4;
  std::int64_t batch_size = 1;
  double l1_weight = 100.0;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::uint64_t seed = 0;
  LrDecay decay = LrDecay::linear;

  void validate() const;
  bool operator==(const Hyperparams&) const = default;
};

/// Learning rate for a 0-based epoch. Throws ValidationError outside
/// [0, total_epochs).
double lr_schedule(std::int64_t epoch, const Hyperparams& hyper);

struct EpochStats {
  std::int64_t epoch = 0;
  double mean_g_loss = 0.0;
  double mean_d_loss = 0.0;
  double mean_l1 = 0.0;
  double lr_used = 0.0;
};

/// `epoch,lr,g_loss,d_loss,l1` with round-trippable precision.
std::string format_epoch_csv(const EpochStats& stats);
inline constexpr const char* kEpochCsvHeader = "epoch,lr,g_loss,d_loss,l1";

}  // namespace fedsynth
