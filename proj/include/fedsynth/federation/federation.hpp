#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "fedsynth/federation/aggregate.hpp"
#include "fedsynth/training/trainer.hpp"

namespace fedsynth {

/// One institution: private data plus its local copy of both networks and
/// optimizer state. Optimizer moments stay local across rounds.
struct ClientState {
  std::string client_id;
  std::vector<SlicePair> dataset;
  Pix2PixModel<float> model;

  std::size_t dataset_size() const { return dataset.size(); }
};

struct FederationOptions {
  Weighting weighting = Weighting::dataset_size;
  bool aggregate_discriminator = true;
  /// Local epochs between synchronizations.
  std::int64_t local_epochs = 1;
  /// Sequential clients in client order. When false, clients of a round run
  /// on separate threads; the round still waits for every submission.
  bool deterministic = true;
  /// Per-round log line (see format_round_csv).
  std::ostream* round_log = nullptr;
  /// Per-epoch training log, one CSV line per client epoch prefixed by client_id.
  std::ostream* epoch_log = nullptr;
};

struct RoundRecord {
  std::int64_t round_index = 0;
  std::vector<std::string> client_ids;
  std::vector<double> weights;
  ParameterSet aggregated_generator;
  /// Empty when discriminators are not aggregated.
  ParameterSet aggregated_discriminator;
  std::vector<std::uint32_t> client_hashes;  // of each submitted generator
  std::uint32_t aggregate_hash = 0;
  std::vector<EpochStats> client_stats;  // last local epoch per client
};

/// CRC-32 of the checkpoint encoding of `params`.
std::uint32_t parameter_hash(const ParameterSet& params);

inline constexpr const char* kRoundCsvHeader = "round,weights,client_hashes,aggregate_hash";
/// `round,w0;w1,h0;h1,agg` with hashes as 8-digit hex.
std::string format_round_csv(const RoundRecord& record);

/// Local training on every client, FedGAN aggregation of generators (and
/// discriminators unless disabled) weighted per options, then broadcast of the
/// aggregate into every client. Client errors are rethrown with the client id.
RoundRecord run_round(std::vector<ClientState>& clients, std::int64_t round_index,
                      const FederationOptions& options = {});

struct FederatedResult {
  ParameterSet generator;
  ParameterSet discriminator;
  std::vector<RoundRecord> rounds;
};

using RoundCallback = std::function<void(const RoundRecord&, const std::vector<ClientState>&)>;

/// Rounds [first_round, first_round + num_rounds). `on_round_end` runs after
/// each broadcast (checkpointing hooks in here).
FederatedResult run_federated_training(std::vector<ClientState>& clients, std::int64_t num_rounds,
                                       const FederationOptions& options = {},
                                       std::int64_t first_round = 0,
                                       const RoundCallback& on_round_end = {});

using EpochCallback = std::function<void(const EpochStats&, const Pix2PixModel<float>&)>;

/// Plain single-site training over epochs [first_epoch, first_epoch + num_epochs).
std::vector<EpochStats> run_local_training(Pix2PixModel<float>& model,
                                           std::span<const SlicePair> dataset,
                                           std::int64_t num_epochs, std::int64_t first_epoch = 0,
                                           std::ostream* epoch_log = nullptr,
                                           const EpochCallback& on_epoch_end = {});

}  // namespace fedsynth
