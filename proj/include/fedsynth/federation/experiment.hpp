#pragma once

#include <array>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fedsynth/federation/federation.hpp"
#include "fedsynth/metrics/report.hpp"

namespace fedsynth {

enum class TrainingMode { baseline_a, baseline_b, central, federated };

inline constexpr std::array<TrainingMode, 4> kTrainingModes = {
    TrainingMode::baseline_a, TrainingMode::baseline_b, TrainingMode::central,
    TrainingMode::federated};

std::string to_string(TrainingMode mode);
TrainingMode parse_training_mode(const std::string& name);

struct ExperimentSettings {
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  Hyperparams hyper;
  FederationOptions federation;
  /// Progress lines ("<mode> epoch e ..."), optional.
  std::ostream* progress = nullptr;
};

/// Site A data first, then site B; the central model trains on this.
std::vector<SlicePair> concatenate(std::span<const SlicePair> a, std::span<const SlicePair> b);

/// Federated clients "A" and "B", both initialised from hyper.seed; client k
/// shuffles with seed hyper.seed + k.
std::vector<ClientState> make_clients(std::span<const SlicePair> site_a,
                                      std::span<const SlicePair> site_b,
                                      const ExperimentSettings& settings);

/// Trains one of the four models for hyper.total_epochs epochs (or rounds)
/// and returns its final generator parameters.
ParameterSet train_model(TrainingMode mode, std::span<const SlicePair> site_a,
                         std::span<const SlicePair> site_b, const ExperimentSettings& settings);

/// Trains Baseline-A, Baseline-B, Central and the two-client federated model,
/// evaluates each on both test sets and assembles the comparison.
ComparisonReport run_experiment_matrix(std::span<const SlicePair> site_a,
                                       std::span<const SlicePair> site_b,
                                       std::span<const SlicePair> test_a,
                                       std::span<const SlicePair> test_b,
                                       const ExperimentSettings& settings);

/// Evaluates trained generators (indexed like kModelNames) on both test sets.
ComparisonReport compare_generators(const std::array<ParameterSet, 4>& generators,
                                    const GeneratorConfig& config,
                                    std::span<const SlicePair> test_a,
                                    std::span<const SlicePair> test_b);

}  // namespace fedsynth
