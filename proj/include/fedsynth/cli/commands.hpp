#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "fedsynth/cli/config.hpp"
#include "fedsynth/federation/experiment.hpp"
#include "fedsynth/metrics/report.hpp"

namespace fedsynth::cli {

// Output layout under config.output_dir:
//   data/site_a/{train,test}/   corpora with manifest.csv
//   data/site_b/{train,test}/
//   models/<mode>/checkpoint.fgck   latest periodic checkpoint (resumable)
//   models/<mode>/final.fgck        completed run
//   models/<mode>/epochs.csv        per-epoch losses (federated: per client)
//   models/federated/rounds.csv     one record per round
//   report/report.{json,txt}, report/ssim_per_pair.csv, report/montage_{A,B}.png

std::filesystem::path corpus_dir(const ExperimentConfig& config, std::size_t site,
                                  const std::string& split);
std::filesystem::path model_dir(const ExperimentConfig& config, TrainingMode mode);
std::filesystem::path report_dir(const ExperimentConfig& config);

inline constexpr const char* kCheckpointFile = "checkpoint.fgck";
inline constexpr const char* kFinalFile = "final.fgck";

/// Renders both sites' train/test corpora. Re-running with the same config
/// rewrites identical files.
void cmd_generate_data(const ExperimentConfig& config, std::ostream* log = nullptr);

struct TrainOptions {
  /// Stop after this many epochs (rounds) in this invocation, leaving the
  /// periodic checkpoint behind as an interrupted run would.
  std::optional<std::int64_t> stop_after;
  std::ostream* progress = nullptr;
};

struct TrainSummary {
  std::int64_t start_epoch = 0;
  std::int64_t epochs_completed = 0;
  bool finished = false;
};

/// Trains one model from the corpora on disk. Resumes from the periodic
/// checkpoint when one exists; a finished model is left untouched.
TrainSummary cmd_train(const ExperimentConfig& config, TrainingMode mode,
                       const TrainOptions& options = {});

/// Evaluates the four finished models on both test sets and writes the
/// report files and montages. Missing models are named in the error.
ComparisonReport cmd_compare(const ExperimentConfig& config, std::ostream* log = nullptr);

/// generate-data, all four trainings and compare.
ComparisonReport cmd_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

}  // namespace fedsynth::cli
