#include "fedsynth/models/config.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "fedsynth/errors.hpp"
#include "fedsynth/nn/ops.hpp"

namespace fedsynth {

void GeneratorConfig::validate() const {
  if (resolution < 16 || !std::has_single_bit(static_cast<std::uint64_t>(resolution))) {
    throw ValidationError("generator resolution must be a power of two >= 16, got " +
                          std::to_string(resolution));
  }
  if (input_channels < 1 || output_channels < 1) {
    throw ValidationError("generator channel counts must be >= 1");
  }
  if (base_channels < 1 || channel_cap < base_channels) {
    throw ValidationError("generator needs base_channels >= 1 and channel_cap >= base_channels");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ValidationError("dropout_rate must lie in [0, 1)");
  }
  if (!(init_scale >= 0.0)) throw ValidationError("init_scale must be >= 0");
}

std::int64_t GeneratorConfig::depth() const {
  return std::bit_width(static_cast<std::uint64_t>(resolution)) - 1;
}

std::int64_t GeneratorConfig::encoder_channels(std::int64_t i) const {
  std::int64_t c = base_channels;
  for (std::int64_t k = 0; k < i && c < channel_cap; ++k) c *= 2;
  return std::min(c, channel_cap);
}

void DiscriminatorConfig::validate() const {
  if (input_channels < 1 || base_channels < 1) {
    throw ValidationError("discriminator channel counts must be >= 1");
  }
  if (num_strided_layers < 1) throw ValidationError("num_strided_layers must be >= 1");
  if (kernel < 2) throw ValidationError("discriminator kernel must be >= 2");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) {
    throw ValidationError("leaky_slope must lie in [0, 1)");
  }
  if (!(init_scale >= 0.0)) throw ValidationError("init_scale must be >= 0");
}

std::int64_t DiscriminatorConfig::layer_channels(std::int64_t i) const {
  if (i >= num_strided_layers + 1) return 1;
  return base_channels * std::min<std::int64_t>(std::int64_t{1} << std::min<std::int64_t>(i, 3), 8);
}

std::int64_t DiscriminatorConfig::patch_map_size(std::int64_t n) const {
  for (std::int64_t i = 0; i < layer_count(); ++i) {
    n = nn::conv_output_size(n, kernel, i < num_strided_layers ? 2 : 1, 1);
  }
  return n;
}

std::int64_t DiscriminatorConfig::receptive_field() const {
  std::int64_t field = 1;
  std::int64_t jump = 1;
  for (std::int64_t i = 0; i < layer_count(); ++i) {
    field += (kernel - 1) * jump;
    jump *= i < num_strided_layers ? 2 : 1;
  }
  return field;
}

}  // namespace fedsynth
