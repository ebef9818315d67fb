#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedsynth/models/parameter_set.hpp"

namespace fedsynth {

enum class Weighting { dataset_size, equal };

/// Entry-wise convex combination sum_k weights[k] * sets[k]. Weights must be
/// non-negative with a positive sum; they are divided by that sum. Sums run in
/// double and round once to float, so identical inputs come back bit-identical
/// and every output lies within the per-entry range of the inputs.
ParameterSet fedgan_aggregate(std::span<const ParameterSet> sets, std::span<const double> weights);

/// n_k / sum(n) for Weighting::dataset_size, 1/K for Weighting::equal.
std::vector<double> aggregation_weights(std::span<const std::size_t> dataset_sizes,
                                        Weighting weighting);

}  // namespace fedsynth
