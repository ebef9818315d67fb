#include "fedsynth/metrics/evaluate.hpp"

namespace fedsynth {

Image synthesize(Generator& generator, const Image& source) {
  Batch<float> batch{to_feature_map<float>(source)};
  return to_image(generator.forward(batch, Mode::inference).front());
}

std::vector<double> evaluate_model(const Synthesizer& synthesizer, std::span<const SlicePair> test,
                                   const SsimParams& params) {
  if (test.empty()) throw ValidationError("evaluate_model: empty test set");
  std::vector<double> scores;
  scores.reserve(test.size());
  for (const auto& pair : test) scores.push_back(ssim(synthesizer(pair.source), pair.target, params));
  return scores;
}

std::vector<double> evaluate_model(Generator& generator, std::span<const SlicePair> test,
                                   const SsimParams& params) {
  return evaluate_model([&](const Image& source) { return synthesize(generator, source); }, test,
                        params);
}

}  // namespace fedsynth
