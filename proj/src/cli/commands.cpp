#include "fedsynth/cli/commands.hpp"

#include <fstream>
#include <sstream>

#include "fedsynth/data/corpus.hpp"
#include "fedsynth/data/phantom.hpp"
#include "fedsynth/metrics/evaluate.hpp"
#include "fedsynth/models/checkpoint.hpp"
#include "fedsynth/version.hpp"

namespace fedsynth::cli {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path corpus_dir(const ExperimentConfig& config, std::size_t site, const std::string& split) {
  return config.output_dir / "data" / (site == 0 ? "site_a" : "site_b") / split;
}

fs::path model_dir(const ExperimentConfig& config, TrainingMode mode) {
  return config.output_dir / "models" / to_string(mode);
}

fs::path report_dir(const ExperimentConfig& config) { return config.output_dir / "report"; }

void cmd_generate_data(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  for (std::size_t k = 0; k < config.sites.size(); ++k) {
    const auto data = generate_site_dataset(config.sites[k], config.n_train, config.n_test,
                                            config.generator.resolution, config.data_seed + k);
    for (const char* split : {"train", "test"}) {
      const fs::path root = corpus_dir(config, k, split);
      fs::remove_all(root);
      write_corpus(root, std::string(split) == "train" ? data.train : data.test);
      if (log != nullptr) {
        *log << "wrote " << (std::string(split) == "train" ? data.train.size() : data.test.size())
             << " pairs to " << root.string() << '\n';
      }
    }
  }
}

namespace {

std::vector<SlicePair> load_split(const ExperimentConfig& config, std::size_t site,
                                  const std::string& split, std::ostream* log) {
  const fs::path root = corpus_dir(config, site, split);
  if (!fs::is_directory(root)) {
    throw ValidationError("missing corpus " + root.string() + " (run generate-data first)");
  }
  auto loaded = load_paired_dataset(root, config.sites[site].site_id);
  if (log != nullptr) {
    for (const auto& w : loaded.warnings) *log << "warning: " << w << '\n';
  }
  for (const auto& p : loaded.pairs) {
    if (p.source.rows() != config.generator.resolution ||
        p.source.cols() != config.generator.resolution) {
      throw ShapeError("pair '" + p.pair_id + "' in " + root.string() + " is " +
                       std::to_string(p.source.rows()) + "x" + std::to_string(p.source.cols()) +
                       ", config resolution is " + std::to_string(config.generator.resolution));
    }
  }
  return std::move(loaded.pairs);
}

json checkpoint_config(const ExperimentConfig& config, TrainingMode mode) {
  return {{"mode", to_string(mode)}, {"training", training_fingerprint(config)},
          {"version", kVersion}};
}

void require_same_run(const Checkpoint& checkpoint, const ExperimentConfig& config,
                      TrainingMode mode, const fs::path& path) {
  const auto& meta = checkpoint.metadata.config;
  if (!meta.contains("mode") || meta["mode"] != to_string(mode) || !meta.contains("training") ||
      meta["training"] != training_fingerprint(config)) {
    throw ValidationError(path.string() +
                          " was written by a different configuration; remove it or choose "
                          "another --out");
  }
}

ParameterSet local_state(const Pix2PixModel<float>& model) {
  return model.generator.export_parameters()
      .with_prefix("generator.")
      .merged(model.discriminator.export_parameters().with_prefix("discriminator."))
      .merged(export_optimizer_state(model).with_prefix("optimizer."));
}

void restore_local_state(Pix2PixModel<float>& model, const ParameterSet& state) {
  model.generator.import_parameters(state.with_prefix_stripped("generator."));
  model.discriminator.import_parameters(state.with_prefix_stripped("discriminator."));
  import_optimizer_state(model, state.with_prefix_stripped("optimizer."));
}

ParameterSet federated_state(const std::vector<ClientState>& clients) {
  ParameterSet state = clients.front().model.generator.export_parameters().with_prefix("generator.");
  for (const auto& c : clients) {
    const std::string prefix = "client." + c.client_id + ".";
    state = state.merged(c.model.discriminator.export_parameters().with_prefix(prefix + "discriminator."))
                .merged(export_optimizer_state(c.model).with_prefix(prefix + "optimizer."));
  }
  return state;
}

void restore_federated_state(std::vector<ClientState>& clients, const ParameterSet& state) {
  const auto generator = state.with_prefix_stripped("generator.");
  for (auto& c : clients) {
    const std::string prefix = "client." + c.client_id + ".";
    c.model.generator.import_parameters(generator);
    c.model.discriminator.import_parameters(state.with_prefix_stripped(prefix + "discriminator."));
    import_optimizer_state(c.model, state.with_prefix_stripped(prefix + "optimizer."));
  }
}

/// Rewrites a CSV log keeping the header and the records of epochs before
/// `keep_before` (the epoch index sits in column `field`).
void truncate_log(const fs::path& path, const std::string& header, std::size_t field,
                  std::int64_t keep_before) {
  std::vector<std::string> kept;
  std::ifstream in(path);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    std::stringstream fields(line);
    std::string cell;
    for (std::size_t i = 0; i <= field; ++i) std::getline(fields, cell, ',');
    try {
      if (std::stoll(cell) < keep_before) kept.push_back(line);
    } catch (const std::exception&) {
    }
  }
  in.close();
  std::ofstream out(path, std::ios::trunc);
  out << header << '\n';
  for (const auto& l : kept) out << l << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

ExperimentSettings settings_for(const ExperimentConfig& config, std::ostream* progress) {
  ExperimentSettings s;
  s.generator = config.generator;
  s.discriminator = config.discriminator;
  s.hyper = config.hyper;
  s.federation.weighting = config.weighting;
  s.federation.aggregate_discriminator = config.aggregate_discriminator;
  s.federation.local_epochs = config.local_epochs;
  s.federation.deterministic = config.deterministic;
  s.progress = progress;
  return s;
}

}  // namespace

TrainSummary cmd_train(const ExperimentConfig& config, TrainingMode mode,
                       const TrainOptions& options) {
  config.validate();
  if (options.stop_after && *options.stop_after < 1) {
    throw ValidationError("--stop-after must be >= 1");
  }
  const fs::path dir = model_dir(config, mode);
  const fs::path final_path = dir / kFinalFile;
  const fs::path checkpoint_path = dir / kCheckpointFile;
  const bool federated = mode == TrainingMode::federated;
  const std::int64_t total =
      federated ? config.hyper.total_epochs / config.local_epochs : config.hyper.total_epochs;

  TrainSummary summary;
  if (fs::exists(final_path)) {
    require_same_run(read_checkpoint(final_path), config, mode, final_path);
    summary.start_epoch = summary.epochs_completed = total;
    summary.finished = true;
    if (options.progress != nullptr) {
      *options.progress << to_string(mode) << ": already trained (" << final_path.string() << ")\n";
    }
    return summary;
  }

  std::vector<SlicePair> site_a;
  std::vector<SlicePair> site_b;
  if (mode != TrainingMode::baseline_b) site_a = load_split(config, 0, "train", options.progress);
  if (mode != TrainingMode::baseline_a) site_b = load_split(config, 1, "train", options.progress);

  std::optional<Checkpoint> resume;
  if (fs::exists(checkpoint_path)) {
    resume = read_checkpoint(checkpoint_path);
    require_same_run(*resume, config, mode, checkpoint_path);
    summary.start_epoch = resume->metadata.epoch;
    if (options.progress != nullptr) {
      *options.progress << to_string(mode) << ": resuming at epoch " << summary.start_epoch
                        << '\n';
    }
  }

  fs::create_directories(dir);
  const fs::path epoch_log_path = dir / "epochs.csv";
  const fs::path round_log_path = dir / "rounds.csv";
  truncate_log(epoch_log_path,
               federated ? std::string("client,") + kEpochCsvHeader : kEpochCsvHeader,
               federated ? 1 : 0, summary.start_epoch * (federated ? config.local_epochs : 1));
  std::ofstream epoch_log(epoch_log_path, std::ios::app);
  std::ofstream round_log;
  if (federated) {
    truncate_log(round_log_path, kRoundCsvHeader, 0, summary.start_epoch);
    round_log.open(round_log_path, std::ios::app);
  }

  const std::int64_t end =
      options.stop_after ? std::min(total, summary.start_epoch + *options.stop_after) : total;
  auto save = [&](const fs::path& path, std::int64_t epoch, const ParameterSet& state) {
    CheckpointMetadata meta;
    meta.config = checkpoint_config(config, mode);
    meta.epoch = epoch;
    meta.seed = config.hyper.seed;
    write_checkpoint(path, {meta, state});
  };
  auto periodic = [&](std::int64_t done) {
    return config.checkpoint_every > 0 && done % config.checkpoint_every == 0 && done < total;
  };

  const ExperimentSettings settings = settings_for(config, options.progress);
  ParameterSet final_state;
  if (federated) {
    auto clients = make_clients(site_a, site_b, settings);
    if (resume) restore_federated_state(clients, resume->parameters);
    FederationOptions fed = settings.federation;
    fed.epoch_log = &epoch_log;
    fed.round_log = &round_log;
    for (std::int64_t r = summary.start_epoch; r < end; ++r) {
      const RoundRecord record = run_round(clients, r, fed);
      epoch_log.flush();
      round_log.flush();
      if (options.progress != nullptr) {
        *options.progress << "federated round " << r;
        for (std::size_t k = 0; k < record.client_stats.size(); ++k) {
          *options.progress << ' ' << record.client_ids[k] << ":l1=" << record.client_stats[k].mean_l1;
        }
        *options.progress << '\n';
      }
      if (periodic(r + 1)) save(checkpoint_path, r + 1, federated_state(clients));
    }
    if (end == total) final_state = federated_state(clients);
  } else {
    const auto data = mode == TrainingMode::baseline_a   ? site_a
                      : mode == TrainingMode::baseline_b ? site_b
                                                         : concatenate(site_a, site_b);
    Pix2PixModel<float> model(config.generator, config.discriminator, config.hyper,
                              config.hyper.seed);
    if (resume) restore_local_state(model, resume->parameters);
    EpochOptions epoch_options;
    epoch_options.log = &epoch_log;
    for (std::int64_t e = summary.start_epoch; e < end; ++e) {
      const EpochStats stats = train_local_epoch(model, data, e, epoch_options);
      epoch_log.flush();
      if (options.progress != nullptr) {
        *options.progress << to_string(mode) << " epoch " << e << " l1=" << stats.mean_l1
                          << " g=" << stats.mean_g_loss << " d=" << stats.mean_d_loss << '\n';
      }
      if (periodic(e + 1)) save(checkpoint_path, e + 1, local_state(model));
    }
    if (end == total) final_state = local_state(model);
  }

  summary.epochs_completed = end;
  if (end == total) {
    save(final_path, total, final_state);
    fs::remove(checkpoint_path);
    summary.finished = true;
  }
  return summary;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

/// Rows of source | target | one synthetic image per model, 8-bit.
void write_montage(const fs::path& path, std::span<const SlicePair> test,
                   std::array<Generator, kModelCount>& generators, std::int64_t rows) {
  const auto n = static_cast<Index>(std::min<std::int64_t>(rows, static_cast<std::int64_t>(test.size())));
  const Index r = test.front().source.rows();
  Image canvas = Image::Zero(n * r, (2 + static_cast<Index>(kModelCount)) * r);
  for (Index i = 0; i < n; ++i) {
    const auto& pair = test[static_cast<std::size_t>(i)];
    canvas.block(i * r, 0, r, r) = pair.source;
    canvas.block(i * r, r, r, r) = pair.target;
    for (std::size_t m = 0; m < kModelCount; ++m) {
      canvas.block(i * r, (2 + static_cast<Index>(m)) * r, r, r) =
          synthesize(generators[m], pair.source);
    }
  }
  write_gray_png(path, quantize(canvas, 8), 8);
}

}  // namespace

ComparisonReport cmd_compare(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  std::array<ParameterSet, kModelCount> parameters;
  std::vector<std::string> missing;
  for (std::size_t m = 0; m < kModelCount; ++m) {
    const auto mode = kTrainingModes[m];
    const fs::path path = model_dir(config, mode) / kFinalFile;
    if (!fs::exists(path)) {
      missing.push_back(to_string(mode) + " (" + path.string() + ")");
      continue;
    }
    const auto checkpoint = read_checkpoint(path);
    require_same_run(checkpoint, config, mode, path);
    parameters[m] = checkpoint.parameters.with_prefix_stripped("generator.");
  }
  if (!missing.empty()) {
    std::string message = "missing trained models:";
    for (const auto& m : missing) message += " " + m;
    throw ValidationError(message + "; run train for each mode first");
  }

  const auto test_a = load_split(config, 0, "test", log);
  const auto test_b = load_split(config, 1, "test", log);
  ComparisonReport report = compare_generators(parameters, config.generator, test_a, test_b);
  report.config = to_json(config);
  report.version = kVersion;

  const fs::path dir = report_dir(config);
  fs::create_directories(dir);
  write_text(dir / "report.json", report_json(report).dump(2) + "\n");
  write_text(dir / "report.txt", report_text(report));
  write_text(dir / "ssim_per_pair.csv", report_csv(report));

  std::array<Generator, kModelCount> generators = {
      Generator(config.generator, 0), Generator(config.generator, 0),
      Generator(config.generator, 0), Generator(config.generator, 0)};
  for (std::size_t m = 0; m < kModelCount; ++m) generators[m].import_parameters(parameters[m]);
  write_montage(dir / "montage_A.png", test_a, generators, config.montage_rows);
  write_montage(dir / "montage_B.png", test_b, generators, config.montage_rows);
  if (log != nullptr) *log << report_text(report) << "report written to " << dir.string() << '\n';
  return report;
}

ComparisonReport cmd_experiment(const ExperimentConfig& config, std::ostream* log) {
  cmd_generate_data(config, log);
  TrainOptions options;
  options.progress = log;
  for (auto mode : kTrainingModes) cmd_train(config, mode, options);
  return cmd_compare(config, log);
}

}  // namespace fedsynth::cli
