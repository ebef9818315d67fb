#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fedsynth/models/config.hpp"
#include "fedsynth/models/parameter_io.hpp"
#include "fedsynth/nn/layers.hpp"

namespace fedsynth {

/// Conditional PatchGAN. The source and target batches are concatenated along
/// channels; the network emits one raw logit per receptive-field patch.
template <typename Scalar>
class DiscriminatorModel {
 public:
  DiscriminatorModel(const DiscriminatorConfig& config, std::uint64_t seed);

  Batch<Scalar> forward(const Batch<Scalar>& source, const Batch<Scalar>& target);

  struct InputGradients {
    Batch<Scalar> source;
    Batch<Scalar> target;
  };

  /// Accumulates parameter gradients for the last forward(). Input gradients
  /// are computed only when requested.
  InputGradients backward(const Batch<Scalar>& grad_logits, bool need_input_grad);

  std::vector<nn::Parameter<Scalar>*> parameters();
  std::vector<const nn::Parameter<Scalar>*> parameters() const;
  void zero_grad() { nn::zero_grad(parameters()); }

  ParameterSet export_parameters() const { return export_parameter_set(parameters()); }
  void import_parameters(const ParameterSet& params) { import_parameter_set(parameters(), params); }

  const DiscriminatorConfig& config() const { return config_; }
  std::int64_t parameter_count() const;

 private:
  struct Layer {
    nn::Conv2d<Scalar> conv;
    bool normalize = false;
    bool activate = true;
    nn::InstanceNorm<Scalar> norm;
    Batch<Scalar> activation_input;
  };

  DiscriminatorConfig config_;
  std::vector<Layer> layers_;
  Index source_channels_ = 0;
};

extern template class DiscriminatorModel<float>;
extern template class DiscriminatorModel<double>;

using Discriminator = DiscriminatorModel<float>;

// ---------------------------------------------------------------------------

template <typename Scalar>
DiscriminatorModel<Scalar>::DiscriminatorModel(const DiscriminatorConfig& config,
                                               std::uint64_t seed)
    : config_(config) {
  config_.validate();
  const std::int64_t count = config_.layer_count();
  for (std::int64_t i = 0; i < count; ++i) {
    const Index in = i == 0 ? config_.input_channels : config_.layer_channels(i - 1);
    const Index stride = i < config_.num_strided_layers ? 2 : 1;
    Layer layer;
    layer.conv = nn::Conv2d<Scalar>("layers." + std::to_string(i), in, config_.layer_channels(i),
                                    config_.kernel, stride, 1);
    layer.normalize =
        i > 0 && i < count - 1 && config_.normalization == Normalization::instance;
    layer.activate = i < count - 1;
    layers_.push_back(std::move(layer));
  }
  std::mt19937_64 rng(seed);
  for (auto* p : parameters()) {
    if (p->shape.size() > 1) nn::fill_gaussian(*p, config_.init_scale, rng);
  }
}

template <typename Scalar>
Batch<Scalar> DiscriminatorModel<Scalar>::forward(const Batch<Scalar>& source,
                                                  const Batch<Scalar>& target) {
  require_uniform(source, "discriminator forward");
  require_uniform(target, "discriminator forward");
  if (source.size() != target.size() || source.front().height != target.front().height ||
      source.front().width != target.front().width) {
    throw ShapeError("discriminator forward: source " + shape_string(source) +
                     " and target " + shape_string(target) + " differ");
  }
  if (source.front().channels() + target.front().channels() != config_.input_channels) {
    throw ShapeError("discriminator forward: expected " +
                     std::to_string(config_.input_channels) + " combined channels");
  }
  source_channels_ = source.front().channels();
  Batch<Scalar> h = nn::concat_channels(source, target);
  const Scalar slope(config_.leaky_slope);
  for (auto& layer : layers_) {
    h = layer.conv.forward(h);
    if (layer.normalize) h = layer.norm.forward(h);
    if (layer.activate) {
      layer.activation_input = h;
      h = nn::leaky_relu(h, slope);
    }
  }
  return h;
}

template <typename Scalar>
typename DiscriminatorModel<Scalar>::InputGradients DiscriminatorModel<Scalar>::backward(
    const Batch<Scalar>& grad_logits, bool need_input_grad) {
  const Scalar slope(config_.leaky_slope);
  Batch<Scalar> g = grad_logits;
  for (std::size_t ii = layers_.size(); ii-- > 0;) {
    auto& layer = layers_[ii];
    if (layer.activate) g = nn::leaky_relu_backward(g, layer.activation_input, slope);
    if (layer.normalize) g = layer.norm.backward(g);
    g = layer.conv.backward(g, ii > 0 || need_input_grad);
  }
  InputGradients out;
  if (need_input_grad) {
    auto [s, t] = nn::split_channels(g, source_channels_);
    out.source = std::move(s);
    out.target = std::move(t);
  }
  return out;
}

template <typename Scalar>
std::vector<nn::Parameter<Scalar>*> DiscriminatorModel<Scalar>::parameters() {
  std::vector<nn::Parameter<Scalar>*> out;
  for (auto& l : layers_) {
    for (auto* p : l.conv.parameters()) out.push_back(p);
  }
  return out;
}

template <typename Scalar>
std::vector<const nn::Parameter<Scalar>*> DiscriminatorModel<Scalar>::parameters() const {
  std::vector<const nn::Parameter<Scalar>*> out;
  for (const auto& l : layers_) {
    for (const auto* p : l.conv.parameters()) out.push_back(p);
  }
  return out;
}

template <typename Scalar>
std::int64_t DiscriminatorModel<Scalar>::parameter_count() const {
  std::int64_t n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

}  // namespace fedsynth
