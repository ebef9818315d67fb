#pragma once

#include <cstdint>

namespace fedsynth {

enum class Normalization { instance, none };

struct GeneratorConfig {
  std::int64_t input_channels = 1;
  std::int64_t output_channels = 1;
  std::int64_t resolution = 256;
  std::int64_t base_channels = 64;
  std::int64_t channel_cap = 512;
  double dropout_rate = 0.5;
  double init_scale = 0.02;

  /// Throws ValidationError unless resolution is a power of two >= 16 and
  /// the remaining fields are in range.
  void validate() const;
  /// log2(resolution): number of stride-2 encoder blocks, bottleneck is 1x1.
  std::int64_t depth() const;
  /// Output channels of encoder block `i` (0-based).
  std::int64_t encoder_channels(std::int64_t i) const;

  bool operator==(const GeneratorConfig&) const = default;
};

struct DiscriminatorConfig {
  std::int64_t input_channels = 2;
  std::int64_t base_channels = 64;
  std::int64_t num_strided_layers = 3;
  std::int64_t kernel = 4;
  double leaky_slope = 0.2;
  double init_scale = 0.02;
  Normalization normalization = Normalization::instance;

  void validate() const;
  /// Channels after conv layer `i` (0-based) of the num_strided_layers + 1
  /// feature layers; the final layer always has one channel.
  std::int64_t layer_channels(std::int64_t i) const;
  std::int64_t layer_count() const { return num_strided_layers + 2; }
  /// Spatial size of the patch logit map for an n x n input.
  std::int64_t patch_map_size(std::int64_t n) const;
  /// Receptive field (pixels per side) of one patch logit.
  std::int64_t receptive_field() const;

  bool operator==(const DiscriminatorConfig&) const = default;
};

}  // namespace fedsynth
