#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fedsynth/models/config.hpp"
#include "fedsynth/models/parameter_io.hpp"
#include "fedsynth/nn/layers.hpp"

namespace fedsynth {

enum class Mode { train, inference };

/// U-Net generator. Encoder: log2(resolution) stride-2 convolutions down to a
/// 1x1 bottleneck. Decoder: mirrored stride-2 transposed convolutions, each
/// followed by concatenation with the matching encoder activation. Output is
/// squashed to (-1, 1) with tanh.
template <typename Scalar>
class GeneratorModel {
 public:
  GeneratorModel(const GeneratorConfig& config, std::uint64_t seed);

  /// `rng` drives dropout in Mode::train and may be null in Mode::inference.
  Batch<Scalar> forward(const Batch<Scalar>& source, Mode mode, std::mt19937_64* rng = nullptr);

  /// Back-propagates through the most recent forward(); accumulates parameter
  /// gradients and returns the gradient with respect to the source batch.
  Batch<Scalar> backward(const Batch<Scalar>& grad_output);

  std::vector<nn::Parameter<Scalar>*> parameters();
  std::vector<const nn::Parameter<Scalar>*> parameters() const;
  void zero_grad() { nn::zero_grad(parameters()); }

  ParameterSet export_parameters() const { return export_parameter_set(parameters()); }
  void import_parameters(const ParameterSet& params) { import_parameter_set(parameters(), params); }

  const GeneratorConfig& config() const { return config_; }
  std::int64_t encoder_block_count() const { return static_cast<std::int64_t>(encoder_.size()); }
  std::int64_t decoder_block_count() const { return static_cast<std::int64_t>(decoder_.size()); }
  std::int64_t parameter_count() const;

 private:
  struct EncoderBlock {
    nn::Conv2d<Scalar> conv;
    bool normalize = false;
    nn::InstanceNorm<Scalar> norm;
    Batch<Scalar> activation_input;  // pre-LeakyReLU input (blocks > 0)
  };
  struct DecoderBlock {
    nn::ConvTranspose2d<Scalar> conv;
    bool normalize = false;
    bool dropout = false;
    nn::InstanceNorm<Scalar> norm;
    Batch<Scalar> activation_input;  // pre-ReLU input
    Batch<Scalar> dropout_mask;
    bool dropout_applied = false;
  };

  GeneratorConfig config_;
  std::vector<EncoderBlock> encoder_;
  std::vector<DecoderBlock> decoder_;
  Batch<Scalar> output_;  // tanh output of the last forward
};

extern template class GeneratorModel<float>;
extern template class GeneratorModel<double>;

using Generator = GeneratorModel<float>;

// ---------------------------------------------------------------------------

template <typename Scalar>
GeneratorModel<Scalar>::GeneratorModel(const GeneratorConfig& config, std::uint64_t seed)
    : config_(config) {
  config_.validate();
  const std::int64_t depth = config_.depth();
  constexpr Index kKernel = 4;
  for (std::int64_t i = 0; i < depth; ++i) {
    const Index in = i == 0 ? config_.input_channels : config_.encoder_channels(i - 1);
    EncoderBlock block;
    block.conv = nn::Conv2d<Scalar>("encoder." + std::to_string(i), in,
                                    config_.encoder_channels(i), kKernel, 2, 1);
    block.normalize = i > 0 && i < depth - 1;
    encoder_.push_back(std::move(block));
  }
  // decoder_[j] mirrors encoder block depth-1-j; j == depth-1 is the output layer.
  for (std::int64_t j = 0; j < depth; ++j) {
    const std::int64_t mirror = depth - 1 - j;
    const Index in = j == 0 ? config_.encoder_channels(depth - 1)
                            : 2 * config_.encoder_channels(mirror);
    const Index out = j == depth - 1 ? config_.output_channels
                                     : config_.encoder_channels(mirror - 1);
    DecoderBlock block;
    block.conv = nn::ConvTranspose2d<Scalar>("decoder." + std::to_string(j), in, out, kKernel,
                                             2, 1);
    block.normalize = j < depth - 1;
    block.dropout = j < 3 && j < depth - 1 && config_.dropout_rate > 0.0;
    decoder_.push_back(std::move(block));
  }

  std::mt19937_64 rng(seed);
  for (auto* p : parameters()) {
    if (p->shape.size() > 1) nn::fill_gaussian(*p, config_.init_scale, rng);
  }
}

template <typename Scalar>
Batch<Scalar> GeneratorModel<Scalar>::forward(const Batch<Scalar>& source, Mode mode,
                                              std::mt19937_64* rng) {
  require_uniform(source, "generator forward");
  const auto& first = source.front();
  if (first.height != config_.resolution || first.width != config_.resolution ||
      first.channels() != config_.input_channels) {
    throw ShapeError("generator expects " +
                     shape_string(static_cast<Index>(source.size()), config_.input_channels,
                                  config_.resolution, config_.resolution) +
                     ", got " + shape_string(source));
  }
  if (mode == Mode::train && rng == nullptr && config_.dropout_rate > 0.0) {
    throw ValidationError("generator forward in train mode needs an rng for dropout");
  }

  const Scalar slope(0.2);
  std::vector<Batch<Scalar>> skips(encoder_.size());
  Batch<Scalar> h = source;
  for (std::size_t i = 0; i < encoder_.size(); ++i) {
    auto& block = encoder_[i];
    if (i > 0) {
      block.activation_input = h;
      h = nn::leaky_relu(h, slope);
    }
    h = block.conv.forward(h);
    if (block.normalize) h = block.norm.forward(h);
    skips[i] = h;
  }

  const std::size_t depth = encoder_.size();
  for (std::size_t j = 0; j < depth; ++j) {
    auto& block = decoder_[j];
    block.activation_input = h;
    h = nn::leaky_relu(h, Scalar(0));
    h = block.conv.forward(h);
    if (j == depth - 1) break;
    if (block.normalize) h = block.norm.forward(h);
    block.dropout_applied = block.dropout && mode == Mode::train;
    if (block.dropout_applied) h = nn::dropout(h, config_.dropout_rate, *rng, &block.dropout_mask);
    h = nn::concat_channels(h, skips[depth - 2 - j]);
  }
  output_ = nn::tanh_forward(h);
  return output_;
}

template <typename Scalar>
Batch<Scalar> GeneratorModel<Scalar>::backward(const Batch<Scalar>& grad_output) {
  require_same_shape(grad_output, output_, "generator backward");
  const std::size_t depth = encoder_.size();
  std::vector<Batch<Scalar>> skip_grads(depth);

  Batch<Scalar> g = nn::tanh_backward(grad_output, output_);
  for (std::size_t jj = depth; jj-- > 0;) {
    auto& block = decoder_[jj];
    if (jj != depth - 1) {
      // g is the gradient of concat(decoder output, skip).
      auto [own, skip] = nn::split_channels(g, block.conv.out_channels());
      skip_grads[depth - 2 - jj] = std::move(skip);
      g = std::move(own);
      if (block.dropout_applied) {
        for (std::size_t s = 0; s < g.size(); ++s) {
          g[s].data.array() *= block.dropout_mask[s].data.array();
        }
      }
      if (block.normalize) g = block.norm.backward(g);
    }
    g = block.conv.backward(g);
    g = nn::leaky_relu_backward(g, block.activation_input, Scalar(0));
  }

  // g is now the gradient of the bottleneck (last encoder output).
  for (std::size_t ii = depth; ii-- > 0;) {
    auto& block = encoder_[ii];
    if (ii != depth - 1) nn::accumulate(g, skip_grads[ii]);
    if (block.normalize) g = block.norm.backward(g);
    g = block.conv.backward(g);
    if (ii > 0) g = nn::leaky_relu_backward(g, block.activation_input, Scalar(0.2));
  }
  return g;
}

template <typename Scalar>
std::vector<nn::Parameter<Scalar>*> GeneratorModel<Scalar>::parameters() {
  std::vector<nn::Parameter<Scalar>*> out;
  for (auto& b : encoder_) {
    for (auto* p : b.conv.parameters()) out.push_back(p);
  }
  for (auto& b : decoder_) {
    for (auto* p : b.conv.parameters()) out.push_back(p);
  }
  return out;
}

template <typename Scalar>
std::vector<const nn::Parameter<Scalar>*> GeneratorModel<Scalar>::parameters() const {
  std::vector<const nn::Parameter<Scalar>*> out;
  for (const auto& b : encoder_) {
    for (const auto* p : b.conv.parameters()) out.push_back(p);
  }
  for (const auto& b : decoder_) {
    for (const auto* p : b.conv.parameters()) out.push_back(p);
  }
  return out;
}

template <typename Scalar>
std::int64_t GeneratorModel<Scalar>::parameter_count() const {
  std::int64_t n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

}  // namespace fedsynth
