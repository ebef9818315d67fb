#include "fedsynth/federation/experiment.hpp"

#include "fedsynth/metrics/evaluate.hpp"

namespace fedsynth {

std::string to_string(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::baseline_a:
      return "baseline-a";
    case TrainingMode::baseline_b:
      return "baseline-b";
    case TrainingMode::central:
      return "central";
    case TrainingMode::federated:
      return "federated";
  }
  return "unknown";
}

TrainingMode parse_training_mode(const std::string& name) {
  for (auto mode : kTrainingModes) {
    if (to_string(mode) == name) return mode;
  }
  throw ValidationError("unknown training mode '" + name +
                        "' (expected baseline-a, baseline-b, central or federated)");
}

std::vector<SlicePair> concatenate(std::span<const SlicePair> a, std::span<const SlicePair> b) {
  std::vector<SlicePair> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<ClientState> make_clients(std::span<const SlicePair> site_a,
                                      std::span<const SlicePair> site_b,
                                      const ExperimentSettings& settings) {
  std::vector<ClientState> clients;
  const std::array<std::span<const SlicePair>, 2> data = {site_a, site_b};
  for (std::size_t k = 0; k < data.size(); ++k) {
    Hyperparams hyper = settings.hyper;
    hyper.seed = settings.hyper.seed + k;
    clients.push_back({std::string(kTestSetNames[k]),
                       std::vector<SlicePair>(data[k].begin(), data[k].end()),
                       Pix2PixModel<float>(settings.generator, settings.discriminator, hyper,
                                           settings.hyper.seed)});
  }
  return clients;
}

ParameterSet train_model(TrainingMode mode, std::span<const SlicePair> site_a,
                         std::span<const SlicePair> site_b, const ExperimentSettings& settings) {
  const std::int64_t epochs = settings.hyper.total_epochs;
  if (mode == TrainingMode::federated) {
    auto clients = make_clients(site_a, site_b, settings);
    const std::int64_t rounds = epochs / settings.federation.local_epochs;
    if (rounds * settings.federation.local_epochs != epochs) {
      throw ValidationError("total_epochs must be a multiple of local_epochs");
    }
    RoundCallback progress;
    if (settings.progress != nullptr) {
      progress = [&](const RoundRecord& r, const std::vector<ClientState>&) {
        *settings.progress << "federated round " << r.round_index;
        for (std::size_t k = 0; k < r.client_stats.size(); ++k) {
          *settings.progress << " " << r.client_ids[k] << ":l1=" << r.client_stats[k].mean_l1;
        }
        *settings.progress << std::endl;
      };
    }
    return run_federated_training(clients, rounds, settings.federation, 0, progress).generator;
  }

  std::vector<SlicePair> data;
  switch (mode) {
    case TrainingMode::baseline_a:
      data.assign(site_a.begin(), site_a.end());
      break;
    case TrainingMode::baseline_b:
      data.assign(site_b.begin(), site_b.end());
      break;
    default:
      data = concatenate(site_a, site_b);
      break;
  }
  Pix2PixModel<float> model(settings.generator, settings.discriminator, settings.hyper,
                            settings.hyper.seed);
  EpochCallback progress;
  if (settings.progress != nullptr) {
    progress = [&](const EpochStats& s, const Pix2PixModel<float>&) {
      *settings.progress << to_string(mode) << " epoch " << s.epoch << " l1=" << s.mean_l1
                         << " g=" << s.mean_g_loss << " d=" << s.mean_d_loss << std::endl;
    };
  }
  run_local_training(model, data, epochs, 0, nullptr, progress);
  return model.generator.export_parameters();
}

ComparisonReport compare_generators(const std::array<ParameterSet, 4>& generators,
                                    const GeneratorConfig& config,
                                    std::span<const SlicePair> test_a,
                                    std::span<const SlicePair> test_b) {
  const std::array<std::span<const SlicePair>, kTestSetCount> tests = {test_a, test_b};
  SsimTable table;
  std::array<std::vector<std::string>, kTestSetCount> ids;
  for (std::size_t m = 0; m < kModelCount; ++m) {
    Generator generator(config, 0);
    generator.import_parameters(generators[m]);
    for (std::size_t t = 0; t < kTestSetCount; ++t) {
      table[t][m] = evaluate_model(generator, tests[t]);
    }
  }
  for (std::size_t t = 0; t < kTestSetCount; ++t) {
    for (const auto& p : tests[t]) ids[t].push_back(p.pair_id);
  }
  return build_comparison_report(table, ids);
}

ComparisonReport run_experiment_matrix(std::span<const SlicePair> site_a,
                                       std::span<const SlicePair> site_b,
                                       std::span<const SlicePair> test_a,
                                       std::span<const SlicePair> test_b,
                                       const ExperimentSettings& settings) {
  for (auto set : {site_a, site_b, test_a, test_b}) {
    if (set.empty()) throw ValidationError("run_experiment_matrix: empty dataset");
    for (const auto& p : set) {
      if (p.source.rows() != settings.generator.resolution ||
          p.source.cols() != settings.generator.resolution) {
        throw ShapeError("run_experiment_matrix: pair '" + p.pair_id +
                         "' does not match the configured resolution");
      }
    }
  }
  std::array<ParameterSet, 4> generators;
  for (std::size_t m = 0; m < kTrainingModes.size(); ++m) {
    generators[m] = train_model(kTrainingModes[m], site_a, site_b, settings);
  }
  return compare_generators(generators, settings.generator, test_a, test_b);
}

}  // namespace fedsynth
