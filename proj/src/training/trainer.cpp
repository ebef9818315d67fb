#include "fedsynth/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fedsynth {

std::mt19937_64 epoch_rng(std::uint64_t seed, std::int64_t epoch) {
  const auto e = static_cast<std::uint64_t>(epoch);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(e), static_cast<std::uint32_t>(e >> 32)};
  return std::mt19937_64(seq);
}

template <typename Scalar>
EpochStats train_local_epoch(Pix2PixModel<Scalar>& model, std::span<const SlicePair> dataset,
                             std::int64_t epoch, const EpochOptions& options) {
  if (dataset.empty()) throw ValidationError("train_local_epoch: empty dataset");
  const double lr = options.lr_override ? *options.lr_override : lr_schedule(epoch, model.hyper);

  auto rng = epoch_rng(model.hyper.seed, epoch);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  const auto batch_size = static_cast<std::size_t>(model.hyper.batch_size);
  double g_sum = 0.0;
  double d_sum = 0.0;
  double l1_sum = 0.0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t stop = std::min(order.size(), start + batch_size);
    Batch<Scalar> source;
    Batch<Scalar> target;
    for (std::size_t i = start; i < stop; ++i) {
      const auto& pair = dataset[order[i]];
      source.push_back(to_feature_map<Scalar>(pair.source));
      target.push_back(to_feature_map<Scalar>(pair.target));
    }

    const Batch<Scalar> fake = model.generator.forward(source, Mode::train, &rng);

    const double d_loss = discriminator_gradients(model.discriminator, source, target, fake);
    if (!std::isfinite(d_loss)) {
      throw NumericalError("non-finite discriminator loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batches));
    }
    model.discriminator_optimizer.step(model.discriminator.parameters(), lr);

    const GeneratorLoss g = generator_gradients(model.generator, model.discriminator, source,
                                                target, fake, model.hyper.l1_weight);
    if (!std::isfinite(g.g_loss)) {
      throw NumericalError("non-finite generator loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batches));
    }
    model.generator_optimizer.step(model.generator.parameters(), lr);

    g_sum += g.g_loss;
    d_sum += d_loss;
    l1_sum += g.l1;
    ++batches;
  }

  EpochStats stats;
  stats.epoch = epoch;
  stats.lr_used = lr;
  stats.mean_g_loss = g_sum / static_cast<double>(batches);
  stats.mean_d_loss = d_sum / static_cast<double>(batches);
  stats.mean_l1 = l1_sum / static_cast<double>(batches);
  if (options.log != nullptr) *options.log << format_epoch_csv(stats) << '\n';
  return stats;
}

template EpochStats train_local_epoch<float>(Pix2PixModel<float>&, std::span<const SlicePair>,
                                             std::int64_t, const EpochOptions&);
template EpochStats train_local_epoch<double>(Pix2PixModel<double>&, std::span<const SlicePair>,
                                              std::int64_t, const EpochOptions&);

namespace {

template <typename Scalar>
void export_adam(ParameterSet& out, const std::string& prefix, const nn::Adam<Scalar>& adam,
                 const std::vector<const nn::Parameter<Scalar>*>& params) {
  out.add({prefix + ".steps", {1}, {static_cast<float>(adam.steps())}});
  const bool fresh = adam.first_moments().empty();
  for (int which = 0; which < 2; ++which) {
    const auto& moments = which == 0 ? adam.first_moments() : adam.second_moments();
    for (std::size_t i = 0; i < params.size(); ++i) {
      ParameterEntry e;
      e.name = prefix + (which == 0 ? ".m." : ".v.") + params[i]->name;
      e.shape.assign(params[i]->shape.begin(), params[i]->shape.end());
      e.values.assign(static_cast<std::size_t>(params[i]->value.size()), 0.0f);
      if (!fresh) {
        for (Index k = 0; k < moments[i].size(); ++k) e.values[k] = static_cast<float>(moments[i][k]);
      }
      out.add(std::move(e));
    }
  }
}

template <typename Scalar>
void import_adam(const ParameterSet& state, const std::string& prefix, nn::Adam<Scalar>& adam,
                 const std::vector<nn::Parameter<Scalar>*>& params) {
  const auto* steps = state.find(prefix + ".steps");
  if (steps == nullptr || steps->values.size() != 1) {
    throw ValidationError("optimizer state lacks '" + prefix + ".steps'");
  }
  std::vector<Vector<Scalar>> moments[2];
  for (int which = 0; which < 2; ++which) {
    for (const auto* p : params) {
      const std::string name = prefix + (which == 0 ? ".m." : ".v.") + p->name;
      const auto* e = state.find(name);
      if (e == nullptr || e->element_count() != p->value.size()) {
        throw ShapeError("optimizer state entry '" + name + "' missing or mis-shaped");
      }
      Vector<Scalar> v(p->value.size());
      for (Index k = 0; k < v.size(); ++k) v[k] = static_cast<Scalar>(e->values[k]);
      moments[which].push_back(std::move(v));
    }
  }
  adam.restore(static_cast<std::int64_t>(steps->values[0]), std::move(moments[0]),
               std::move(moments[1]));
}

}  // namespace

template <typename Scalar>
ParameterSet export_optimizer_state(const Pix2PixModel<Scalar>& model) {
  ParameterSet out;
  export_adam(out, "generator", model.generator_optimizer, model.generator.parameters());
  export_adam(out, "discriminator", model.discriminator_optimizer,
              model.discriminator.parameters());
  return out;
}

template <typename Scalar>
void import_optimizer_state(Pix2PixModel<Scalar>& model, const ParameterSet& state) {
  import_adam(state, "generator", model.generator_optimizer, model.generator.parameters());
  import_adam(state, "discriminator", model.discriminator_optimizer,
              model.discriminator.parameters());
}

template ParameterSet export_optimizer_state<float>(const Pix2PixModel<float>&);
template void import_optimizer_state<float>(Pix2PixModel<float>&, const ParameterSet&);

}  // namespace fedsynth
