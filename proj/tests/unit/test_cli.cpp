#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fedsynth/cli/commands.hpp"
#include "fedsynth/models/checkpoint.hpp"

using namespace fedsynth;
using namespace fedsynth::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fedsynth-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c;
  c.generator.resolution = 32;
  c.generator.base_channels = 2;
  c.generator.channel_cap = 8;
  c.discriminator.base_channels = 2;
  c.hyper.total_epochs = 4;
  c.n_train = 3;
  c.n_test = 2;
  c.checkpoint_every = 2;
  c.montage_rows = 3;
  c.output_dir = out;
  return c;
}

void train_all(const ExperimentConfig& c) {
  for (auto mode : kTrainingModes) cmd_train(c, mode);
}

}  // namespace

TEST_CASE("config JSON round trip") {
  ExperimentConfig c;
  c.generator.resolution = 64;
  c.hyper.seed = 17;
  c.sites[1].noise_sigma = 0.07;
  c.weighting = Weighting::equal;
  c.aggregate_discriminator = false;
  c.discriminator.normalization = Normalization::none;
  c.hyper.decay = LrDecay::constant_then_linear;
  const auto j = to_json(c);
  const auto back = config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.generator == c.generator);
  CHECK(back.discriminator == c.discriminator);
  CHECK(back.sites == c.sites);
  CHECK(back.weighting == Weighting::equal);
}

TEST_CASE("config defaults follow the published setup") {
  const ExperimentConfig c;
  CHECK(c.generator.resolution == 256);
  CHECK(c.hyper.total_epochs == 200);
  CHECK(c.hyper.initial_lr == 5e-4);
  CHECK(c.hyper.batch_size == 1);
  CHECK(c.n_train == 80);
  CHECK(c.n_test == 20);
  CHECK(c.sites[0].site_id == "A");
  CHECK(c.sites[1].site_id == "B");
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config rejects unknown keys and invalid values") {
  CHECK_THROWS_WITH_AS(config_from_json({{"resolutoin", 64}}), doctest::Contains("resolutoin"),
                       ValidationError);
  CHECK_THROWS_AS(config_from_json({{"generator", {{"depth", 3}}}}), ValidationError);
  CHECK_THROWS_AS(config_from_json({{"resolution", "big"}}), ValidationError);
  CHECK_THROWS_AS(config_from_json({{"sites", nlohmann::json::array()}}), ValidationError);
  auto c = config_from_json({{"n_test", 0}});
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = config_from_json({{"resolution", 48}});
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = config_from_json({{"resolution", 16}});
  CHECK_THROWS_AS(c.validate(), ValidationError);  // too small for three strided layers
  TempDir dir;
  std::ofstream(dir.path / "bad.json") << "{not json";
  CHECK_THROWS_AS(load_config(dir.path / "bad.json"), ValidationError);
  CHECK_THROWS_AS(load_config(dir.path / "absent.json"), ValidationError);
}

TEST_CASE("checkpoint files round-trip bit-exactly") {
  TempDir dir;
  Checkpoint cp;
  cp.parameters.add({"w", {2, 2}, {1.0f, -0.0f, 3.5f, std::numeric_limits<float>::denorm_min()}});
  cp.metadata.epoch = 3;
  cp.metadata.seed = 1234567890123ULL;
  cp.metadata.config = {{"a", 1}};
  write_checkpoint(dir.path / "x.fgck", cp);
  const auto back = read_checkpoint(dir.path / "x.fgck");
  CHECK(back == cp);
  CHECK(std::signbit(back.parameters.entries()[0].values[1]));
  CHECK(encode_checkpoint(back) == slurp(dir.path / "x.fgck"));
  CHECK_THROWS(read_checkpoint(dir.path / "missing.fgck"));
}

TEST_CASE("generate-data writes both sites and is repeatable") {
  TempDir dir;
  const auto c = small_config(dir.path);
  cmd_generate_data(c);
  for (std::size_t s = 0; s < 2; ++s) {
    for (const char* split : {"train", "test"}) {
      CHECK(fs::exists(corpus_dir(c, s, split) / "manifest.csv"));
    }
  }
  const auto manifest = slurp(corpus_dir(c, 1, "train") / "manifest.csv");
  cmd_generate_data(c);
  CHECK(slurp(corpus_dir(c, 1, "train") / "manifest.csv") == manifest);
}

TEST_CASE("train requires data and compare names missing models") {
  TempDir dir;
  const auto c = small_config(dir.path);
  CHECK_THROWS_WITH_AS(cmd_train(c, TrainingMode::central), doctest::Contains("generate-data"),
                       ValidationError);
  cmd_generate_data(c);
  cmd_train(c, TrainingMode::baseline_a);
  try {
    cmd_compare(c);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("baseline-b") != std::string::npos);
    CHECK(what.find("federated") != std::string::npos);
    CHECK(what.find("baseline-a (") == std::string::npos);
  }
}

TEST_CASE("interrupted training resumes to the same final state") {
  TempDir dir;
  const auto straight = small_config(dir.path / "straight");
  const auto broken = small_config(dir.path / "broken");
  cmd_generate_data(straight);
  cmd_generate_data(broken);
  for (auto mode : {TrainingMode::central, TrainingMode::federated}) {
    CAPTURE(to_string(mode));
    cmd_train(straight, mode);
    TrainOptions stop;
    stop.stop_after = 3;
    const auto partial = cmd_train(broken, mode, stop);
    CHECK_FALSE(partial.finished);
    CHECK(partial.epochs_completed == 3);
    CHECK(fs::exists(model_dir(broken, mode) / kCheckpointFile));
    CHECK_FALSE(fs::exists(model_dir(broken, mode) / kFinalFile));
    const auto resumed = cmd_train(broken, mode);
    CHECK(resumed.start_epoch == 2);
    CHECK(resumed.finished);
    CHECK_FALSE(fs::exists(model_dir(broken, mode) / kCheckpointFile));
    CHECK(slurp(model_dir(broken, mode) / kFinalFile) ==
          slurp(model_dir(straight, mode) / kFinalFile));
    CHECK(slurp(model_dir(broken, mode) / "epochs.csv") ==
          slurp(model_dir(straight, mode) / "epochs.csv"));
  }
  CHECK(slurp(model_dir(broken, TrainingMode::federated) / "rounds.csv") ==
        slurp(model_dir(straight, TrainingMode::federated) / "rounds.csv"));
  const auto again = cmd_train(straight, TrainingMode::central);
  CHECK(again.finished);
  CHECK(again.start_epoch == 4);
}

TEST_CASE("a checkpoint from another configuration is refused") {
  TempDir dir;
  auto c = small_config(dir.path);
  cmd_generate_data(c);
  TrainOptions stop;
  stop.stop_after = 2;
  cmd_train(c, TrainingMode::baseline_b, stop);
  c.hyper.initial_lr = 1e-3;
  CHECK_THROWS_WITH_AS(cmd_train(c, TrainingMode::baseline_b), doctest::Contains("different"),
                       ValidationError);
}

TEST_CASE("two end-to-end runs give byte-identical per-pair SSIM files") {
  TempDir dir;
  const auto a = small_config(dir.path / "a");
  const auto b = small_config(dir.path / "b");
  for (const auto& c : {a, b}) {
    cmd_generate_data(c);
    train_all(c);
  }
  const auto report = cmd_compare(a);
  cmd_compare(b);
  const auto csv = slurp(report_dir(a) / "ssim_per_pair.csv");
  CHECK(csv == slurp(report_dir(b) / "ssim_per_pair.csv"));
  CHECK(csv == report_csv(report));
  CHECK(slurp(report_dir(a) / "report.txt") == slurp(report_dir(b) / "report.txt"));
  for (const char* f : {"report.json", "montage_A.png", "montage_B.png"}) {
    CHECK(fs::exists(report_dir(a) / f));
  }
  const auto json = nlohmann::json::parse(slurp(report_dir(a) / "report.json"));
  CHECK(json["config"]["seed"] == a.hyper.seed);
  CHECK(json["version"].get<std::string>().find("fedsynth") == 0);
}
