#include "fedsynth/federation/federation.hpp"

#include <zlib.h>

#include <cstdio>
#include <exception>
#include <thread>

#include "fedsynth/models/checkpoint.hpp"

namespace fedsynth {

std::uint32_t parameter_hash(const ParameterSet& params) {
  const std::string bytes = encode_parameter_set(params);
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for large sets.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + offset),
                static_cast<uInt>(chunk));
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string format_round_csv(const RoundRecord& record) {
  std::string line = std::to_string(record.round_index) + ",";
  char buf[32];
  for (std::size_t k = 0; k < record.weights.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s%.17g", k ? ";" : "", record.weights[k]);
    line += buf;
  }
  line += ",";
  for (std::size_t k = 0; k < record.client_hashes.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s%08x", k ? ";" : "", record.client_hashes[k]);
    line += buf;
  }
  std::snprintf(buf, sizeof buf, ",%08x", record.aggregate_hash);
  return line + buf;
}

namespace {

void train_client(ClientState& client, std::int64_t round_index, const FederationOptions& options,
                  EpochStats& last) {
  const std::int64_t first = round_index * options.local_epochs;
  for (std::int64_t e = first; e < first + options.local_epochs; ++e) {
    last = train_local_epoch(client.model, client.dataset, e);
  }
}

}  // namespace

RoundRecord run_round(std::vector<ClientState>& clients, std::int64_t round_index,
                      const FederationOptions& options) {
  if (clients.empty()) throw ValidationError("run_round: no clients");
  if (options.local_epochs < 1) throw ValidationError("run_round: local_epochs must be >= 1");
  const auto reference = clients.front().model.generator.export_parameters();
  for (const auto& c : clients) {
    if (c.dataset.empty()) throw ValidationError("client '" + c.client_id + "' has no data");
    if (!c.model.generator.export_parameters().compatible(reference)) {
      throw ShapeError("client '" + c.client_id + "' has an incompatible generator");
    }
  }

  RoundRecord record;
  record.round_index = round_index;
  record.client_stats.resize(clients.size());

  std::vector<std::exception_ptr> errors(clients.size());
  auto work = [&](std::size_t k) {
    try {
      train_client(clients[k], round_index, options, record.client_stats[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (options.deterministic || clients.size() == 1) {
    for (std::size_t k = 0; k < clients.size(); ++k) work(k);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t k = 0; k < clients.size(); ++k) threads.emplace_back(work, k);
  }
  for (std::size_t k = 0; k < clients.size(); ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const ValidationError& e) {
      throw ValidationError("client '" + clients[k].client_id + "': " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("client '" + clients[k].client_id + "': " + e.what());
    }
  }

  std::vector<ParameterSet> generators;
  std::vector<ParameterSet> discriminators;
  std::vector<std::size_t> sizes;
  for (const auto& c : clients) {
    record.client_ids.push_back(c.client_id);
    generators.push_back(c.model.generator.export_parameters());
    if (options.aggregate_discriminator) {
      discriminators.push_back(c.model.discriminator.export_parameters());
    }
    sizes.push_back(c.dataset_size());
    record.client_hashes.push_back(parameter_hash(generators.back()));
  }
  record.weights = aggregation_weights(sizes, options.weighting);
  record.aggregated_generator = fedgan_aggregate(generators, record.weights);
  if (options.aggregate_discriminator) {
    record.aggregated_discriminator = fedgan_aggregate(discriminators, record.weights);
  }
  record.aggregate_hash = parameter_hash(record.aggregated_generator);

  for (auto& c : clients) {
    c.model.generator.import_parameters(record.aggregated_generator);
    if (options.aggregate_discriminator) {
      c.model.discriminator.import_parameters(record.aggregated_discriminator);
    }
  }
  if (options.epoch_log != nullptr) {
    for (std::size_t k = 0; k < clients.size(); ++k) {
      *options.epoch_log << clients[k].client_id << ',' << format_epoch_csv(record.client_stats[k])
                         << '\n';
    }
  }
  if (options.round_log != nullptr) *options.round_log << format_round_csv(record) << '\n';
  return record;
}

FederatedResult run_federated_training(std::vector<ClientState>& clients, std::int64_t num_rounds,
                                       const FederationOptions& options, std::int64_t first_round,
                                       const RoundCallback& on_round_end) {
  if (num_rounds < 1) throw ValidationError("num_rounds must be >= 1");
  FederatedResult result;
  for (std::int64_t r = first_round; r < first_round + num_rounds; ++r) {
    result.rounds.push_back(run_round(clients, r, options));
    if (on_round_end) on_round_end(result.rounds.back(), clients);
  }
  result.generator = clients.front().model.generator.export_parameters();
  result.discriminator = clients.front().model.discriminator.export_parameters();
  return result;
}

std::vector<EpochStats> run_local_training(Pix2PixModel<float>& model,
                                           std::span<const SlicePair> dataset,
                                           std::int64_t num_epochs, std::int64_t first_epoch,
                                           std::ostream* epoch_log,
                                           const EpochCallback& on_epoch_end) {
  if (num_epochs < 1) throw ValidationError("num_epochs must be >= 1");
  std::vector<EpochStats> stats;
  EpochOptions options;
  options.log = epoch_log;
  for (std::int64_t e = first_epoch; e < first_epoch + num_epochs; ++e) {
    stats.push_back(train_local_epoch(model, dataset, e, options));
    if (on_epoch_end) on_epoch_end(stats.back(), model);
  }
  return stats;
}

}  // namespace fedsynth
