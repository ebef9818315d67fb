#include "fedsynth/federation/aggregate.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fedsynth/errors.hpp"

namespace fedsynth {

ParameterSet fedgan_aggregate(std::span<const ParameterSet> sets, std::span<const double> weights) {
  if (sets.empty()) throw ValidationError("fedgan_aggregate: no parameter sets");
  if (weights.size() != sets.size()) {
    throw ValidationError("fedgan_aggregate: " + std::to_string(sets.size()) + " sets but " +
                          std::to_string(weights.size()) + " weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("fedgan_aggregate: weights must be finite and non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("fedgan_aggregate: weights sum to zero");
  for (std::size_t k = 1; k < sets.size(); ++k) sets[0].require_compatible(sets[k]);

  std::vector<double> normalized(weights.begin(), weights.end());
  for (double& w : normalized) w /= total;

  std::vector<ParameterEntry> out;
  out.reserve(sets[0].size());
  std::vector<double> acc;
  for (std::size_t e = 0; e < sets[0].size(); ++e) {
    const auto& first = sets[0].entries()[e];
    acc.assign(first.values.size(), 0.0);
    for (std::size_t k = 0; k < sets.size(); ++k) {
      const auto& values = sets[k].entries()[e].values;
      const double w = normalized[k];
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * static_cast<double>(values[i]);
    }
    ParameterEntry entry{first.name, first.shape, std::vector<float>(acc.size())};
    for (std::size_t i = 0; i < acc.size(); ++i) entry.values[i] = static_cast<float>(acc[i]);
    out.push_back(std::move(entry));
  }
  return ParameterSet(std::move(out));
}

std::vector<double> aggregation_weights(std::span<const std::size_t> dataset_sizes,
                                        Weighting weighting) {
  if (dataset_sizes.empty()) throw ValidationError("aggregation_weights: no clients");
  std::vector<double> w(dataset_sizes.size());
  if (weighting == Weighting::equal) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  const auto total = static_cast<double>(
      std::accumulate(dataset_sizes.begin(), dataset_sizes.end(), std::size_t{0}));
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (dataset_sizes[k] == 0) throw ValidationError("aggregation_weights: empty client dataset");
    w[k] = static_cast<double>(dataset_sizes[k]) / total;
  }
  return w;
}

}  // namespace fedsynth
