#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "json.hpp"

#include "fedsynth/data/phantom.hpp"
#include "fedsynth/federation/aggregate.hpp"
#include "fedsynth/models/config.hpp"
#include "fedsynth/training/hyperparams.hpp"

namespace fedsynth::cli {

/// Everything a run needs. Every artifact embeds its JSON echo, and feeding
/// that echo back reproduces the run.
struct ExperimentConfig {
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  Hyperparams hyper;
  std::array<SiteProfile, 2> sites;
  std::int64_t n_train = 80;
  std::int64_t n_test = 20;
  std::uint64_t data_seed = 1;
  std::filesystem::path output_dir = "fedsynth-run";
  /// Checkpoint every N epochs (rounds); 0 writes only the final checkpoint.
  std::int64_t checkpoint_every = 10;
  Weighting weighting = Weighting::dataset_size;
  bool aggregate_discriminator = true;
  std::int64_t local_epochs = 1;
  bool deterministic = true;
  std::int64_t montage_rows = 4;

  ExperimentConfig();
  void validate() const;
};

/// Two contrasting synthetic sites: A is upright with mild contrast and
/// strong suppression, B is rotated with a steeper contrast curve, more
/// noise and weaker suppression.
std::array<SiteProfile, 2> default_site_profiles();

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& json);
ExperimentConfig load_config(const std::filesystem::path& path);

/// The subset of the config that determines training results (paths and
/// checkpoint cadence excluded); used to validate resumed runs.
nlohmann::json training_fingerprint(const ExperimentConfig& config);

}  // namespace fedsynth::cli
