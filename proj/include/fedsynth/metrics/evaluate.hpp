#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fedsynth/data/slice.hpp"
#include "fedsynth/metrics/ssim.hpp"
#include "fedsynth/models/generator.hpp"

namespace fedsynth {

/// Maps a [0, 1] source image to a [0, 1] synthetic target.
using Synthesizer = std::function<Image(const Image&)>;

/// Generator inference on one image, including the range mapping both ways.
Image synthesize(Generator& generator, const Image& source);

/// SSIM of synthesize(source) against the ground-truth target, per pair, in
/// input order (the pairing basis for signed-rank comparisons).
std::vector<double> evaluate_model(const Synthesizer& synthesizer, std::span<const SlicePair> test,
                                   const SsimParams& params = {});
std::vector<double> evaluate_model(Generator& generator, std::span<const SlicePair> test,
                                   const SsimParams& params = {});

}  // namespace fedsynth
