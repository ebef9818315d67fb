#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "fedsynth/data/slice.hpp"
#include "fedsynth/models/discriminator.hpp"
#include "fedsynth/models/generator.hpp"
#include "fedsynth/nn/adam.hpp"
#include "fedsynth/training/hyperparams.hpp"
#include "fedsynth/training/losses.hpp"

namespace fedsynth {

/// Generator, discriminator and their optimizers: everything one client owns.
template <typename Scalar>
struct Pix2PixModel {
  GeneratorModel<Scalar> generator;
  DiscriminatorModel<Scalar> discriminator;
  nn::Adam<Scalar> generator_optimizer;
  nn::Adam<Scalar> discriminator_optimizer;
  Hyperparams hyper;

  Pix2PixModel(const GeneratorConfig& g, const DiscriminatorConfig& d, const Hyperparams& h,
               std::uint64_t model_seed)
      : generator(g, model_seed),
        discriminator(d, model_seed ^ 0x9e3779b97f4a7c15ULL),
        generator_optimizer(h.beta1, h.beta2),
        discriminator_optimizer(h.beta1, h.beta2),
        hyper(h) {
    hyper.validate();
  }
};

/// Random stream for one epoch: a pure function of (seed, epoch), so a run
/// resumed at epoch e draws exactly what an uninterrupted run would.
std::mt19937_64 epoch_rng(std::uint64_t seed, std::int64_t epoch);

/// Accumulates discriminator gradients for d = (BCE(D(s,t),1) + BCE(D(s,fake),0)) / 2.
/// `fake` is treated as a constant. Returns d.
template <typename Scalar>
double discriminator_gradients(DiscriminatorModel<Scalar>& disc, const Batch<Scalar>& source,
                               const Batch<Scalar>& target, const Batch<Scalar>& fake) {
  disc.zero_grad();
  auto real = bce_with_logits(disc.forward(source, target), 1.0);
  for (auto& g : real.grad) g.data *= Scalar(0.5);
  disc.backward(real.grad, false);
  auto faked = bce_with_logits(disc.forward(source, fake), 0.0);
  for (auto& g : faked.grad) g.data *= Scalar(0.5);
  disc.backward(faked.grad, false);
  return 0.5 * (real.value + faked.value);
}

struct GeneratorLoss {
  double g_loss = 0.0;
  double l1 = 0.0;
};

/// Accumulates generator gradients for g = BCE(D(s,fake),1) + lambda*l1(fake,t),
/// where `fake` is the output of the generator's most recent forward().
/// Discriminator parameter gradients are clobbered, not applied.
template <typename Scalar>
GeneratorLoss generator_gradients(GeneratorModel<Scalar>& gen, DiscriminatorModel<Scalar>& disc,
                                  const Batch<Scalar>& source, const Batch<Scalar>& target,
                                  const Batch<Scalar>& fake, double lambda) {
  gen.zero_grad();
  disc.zero_grad();
  auto adversarial = bce_with_logits(disc.forward(source, fake), 1.0);
  auto input_grads = disc.backward(adversarial.grad, true);
  auto l1 = l1_loss(fake, target);
  Batch<Scalar> grad = std::move(input_grads.target);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    grad[i].data += static_cast<Scalar>(lambda) * l1.grad[i].data;
  }
  gen.backward(grad);
  return {adversarial.value + lambda * l1.value, l1.value};
}

struct EpochOptions {
  /// Replaces lr_schedule(epoch) when set (e.g. zero-learning-rate checks).
  std::optional<double> lr_override;
  /// Receives one CSV line per epoch.
  std::ostream* log = nullptr;
};

/// One pass over the shuffled dataset: per batch one discriminator step, then
/// one generator step against the updated discriminator. Deterministic given
/// (hyper.seed, epoch, dataset order).
template <typename Scalar>
EpochStats train_local_epoch(Pix2PixModel<Scalar>& model, std::span<const SlicePair> dataset,
                             std::int64_t epoch, const EpochOptions& options = {});

extern template EpochStats train_local_epoch<float>(Pix2PixModel<float>&,
                                                     std::span<const SlicePair>, std::int64_t,
                                                     const EpochOptions&);
extern template EpochStats train_local_epoch<double>(Pix2PixModel<double>&,
                                                      std::span<const SlicePair>, std::int64_t,
                                                      const EpochOptions&);

/// Adam moments and step counters for both networks, as ParameterSet entries
/// (`generator.m.<name>`, `generator.v.<name>`, `generator.steps`, ...).
template <typename Scalar>
ParameterSet export_optimizer_state(const Pix2PixModel<Scalar>& model);
template <typename Scalar>
void import_optimizer_state(Pix2PixModel<Scalar>& model, const ParameterSet& state);

extern template ParameterSet export_optimizer_state<float>(const Pix2PixModel<float>&);
extern template void import_optimizer_state<float>(Pix2PixModel<float>&, const ParameterSet&);

}  // namespace fedsynth
