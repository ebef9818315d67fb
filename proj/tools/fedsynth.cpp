// Command-line front end: generate-data, train, compare, experiment.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fedsynth/cli/commands.hpp"
#include "fedsynth/errors.hpp"
#include "fedsynth/version.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> resolution;
  std::optional<std::int64_t> epochs;
  std::optional<std::string> out;
  bool deterministic = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--seed", o.seed, "Training and data seed");
  cmd->add_option("--resolution", o.resolution, "Image side length (power of two)");
  cmd->add_option("--epochs", o.epochs, "Total epochs (federated: rounds x local epochs)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--deterministic", o.deterministic, "Run federated clients sequentially");
}

fedsynth::cli::ExperimentConfig resolve(const Overrides& o) {
  auto config = o.config_path.empty() ? fedsynth::cli::ExperimentConfig{}
                                      : fedsynth::cli::load_config(o.config_path);
  if (o.seed) {
    config.hyper.seed = *o.seed;
    config.data_seed = *o.seed;
  }
  if (o.resolution) config.generator.resolution = *o.resolution;
  if (o.epochs) config.hyper.total_epochs = *o.epochs;
  if (o.out) config.output_dir = *o.out;
  if (o.deterministic) config.deterministic = true;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated pix2pix synthesis of fat-suppressed images from synthetic sites"};
  app.set_version_flag("--version", fedsynth::kVersion);
  app.require_subcommand(1);

  Overrides o;
  std::string mode_name;
  std::optional<std::int64_t> stop_after;

  auto* generate = app.add_subcommand("generate-data", "Render both sites' train/test corpora");
  add_common(generate, o);
  auto* train = app.add_subcommand("train", "Train one model");
  add_common(train, o);
  train->add_option("--mode", mode_name, "baseline-a | baseline-b | central | federated")
      ->required();
  train->add_option("--stop-after", stop_after, "Stop after N epochs, as if interrupted")
      ->group("");
  auto* compare = app.add_subcommand("compare", "Evaluate the four models and write the report");
  add_common(compare, o);
  auto* experiment = app.add_subcommand("experiment", "generate-data, train all modes, compare");
  add_common(experiment, o);
  auto* show = app.add_subcommand("config", "Print the resolved config as JSON");
  add_common(show, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto config = resolve(o);
    if (*generate) {
      fedsynth::cli::cmd_generate_data(config, &std::cout);
    } else if (*train) {
      fedsynth::cli::TrainOptions options;
      options.stop_after = stop_after;
      options.progress = &std::cerr;
      const auto summary =
          fedsynth::cli::cmd_train(config, fedsynth::parse_training_mode(mode_name), options);
      std::cout << mode_name << ": " << summary.epochs_completed << " epochs completed"
                << (summary.finished ? " (finished)" : " (checkpointed)") << '\n';
    } else if (*compare) {
      fedsynth::cli::cmd_compare(config, &std::cout);
    } else if (*experiment) {
      fedsynth::cli::cmd_experiment(config, &std::cout);
    } else if (*show) {
      std::cout << fedsynth::cli::to_json(config).dump(2) << '\n';
    }
  } catch (const fedsynth::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
