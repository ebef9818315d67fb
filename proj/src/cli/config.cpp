#include "fedsynth/cli/config.hpp"

#include <fstream>

#include "fedsynth/errors.hpp"

namespace fedsynth::cli {

using nlohmann::json;

std::array<SiteProfile, 2> default_site_profiles() {
  SiteProfile a;
  a.site_id = "A";
  a.contrast_gamma = 1.0;
  a.orientation = Orientation::deg0;
  a.noise_sigma = 0.02;
  a.suppression_factor = 0.9;
  a.anatomy_seed_begin = 0;
  a.anatomy_seed_end = 100000;

  SiteProfile b = a;
  b.site_id = "B";
  b.contrast_gamma = 1.8;
  b.orientation = Orientation::deg90;
  b.noise_sigma = 0.03;
  b.suppression_factor = 0.5;
  b.anatomy_seed_begin = 100000;
  b.anatomy_seed_end = 200000;
  return {a, b};
}

ExperimentConfig::ExperimentConfig() : sites(default_site_profiles()) {}

void ExperimentConfig::validate() const {
  generator.validate();
  discriminator.validate();
  hyper.validate();
  for (const auto& s : sites) s.validate();
  if (sites[0].site_id == sites[1].site_id) throw ValidationError("site ids must differ");
  if (n_train < 1) throw ValidationError("n_train must be >= 1");
  if (n_test < 1) throw ValidationError("n_test must be >= 1");
  if (checkpoint_every < 0) throw ValidationError("checkpoint_every must be >= 0");
  if (local_epochs < 1 || hyper.total_epochs % local_epochs != 0) {
    throw ValidationError("local_epochs must be >= 1 and divide total_epochs");
  }
  if (montage_rows < 1) throw ValidationError("montage_rows must be >= 1");
  if (output_dir.empty()) throw ValidationError("output_dir must not be empty");
  if (discriminator.input_channels != generator.input_channels + generator.output_channels) {
    throw ValidationError("discriminator input channels must equal source + target channels");
  }
  if (discriminator.patch_map_size(generator.resolution) < 1) {
    throw ValidationError("resolution too small for the discriminator depth");
  }
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  for (const auto& item : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; })) {
      throw ValidationError(std::string("unknown config key '") + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& into) {
  if (j.contains(key)) {
    try {
      into = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

json site_to_json(const SiteProfile& s) {
  return {{"site_id", s.site_id},
          {"contrast_gamma", s.contrast_gamma},
          {"orientation", s.orientation == Orientation::deg0 ? 0 : 90},
          {"noise_sigma", s.noise_sigma},
          {"anatomy_seed_range", {s.anatomy_seed_begin, s.anatomy_seed_end}},
          {"suppression_factor", s.suppression_factor},
          {"fluid_pockets", {s.min_fluid_pockets, s.max_fluid_pockets}}};
}

SiteProfile site_from_json(const json& j, SiteProfile s) {
  reject_unknown(j,
                 {"site_id", "contrast_gamma", "orientation", "noise_sigma", "anatomy_seed_range",
                  "suppression_factor", "fluid_pockets"},
                 "site");
  read(j, "site_id", s.site_id);
  read(j, "contrast_gamma", s.contrast_gamma);
  if (j.contains("orientation")) {
    int degrees = 0;
    read(j, "orientation", degrees);
    if (degrees != 0 && degrees != 90) throw ValidationError("orientation must be 0 or 90");
    s.orientation = degrees == 0 ? Orientation::deg0 : Orientation::deg90;
  }
  read(j, "noise_sigma", s.noise_sigma);
  read(j, "suppression_factor", s.suppression_factor);
  if (j.contains("anatomy_seed_range")) {
    std::array<std::int64_t, 2> r{};
    read(j, "anatomy_seed_range", r);
    s.anatomy_seed_begin = r[0];
    s.anatomy_seed_end = r[1];
  }
  if (j.contains("fluid_pockets")) {
    std::array<int, 2> r{};
    read(j, "fluid_pockets", r);
    s.min_fluid_pockets = r[0];
    s.max_fluid_pockets = r[1];
  }
  return s;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json j;
  j["resolution"] = c.generator.resolution;
  j["generator"] = {{"input_channels", c.generator.input_channels},
                    {"output_channels", c.generator.output_channels},
                    {"base_channels", c.generator.base_channels},
                    {"channel_cap", c.generator.channel_cap},
                    {"dropout_rate", c.generator.dropout_rate},
                    {"init_scale", c.generator.init_scale}};
  j["discriminator"] = {
      {"base_channels", c.discriminator.base_channels},
      {"num_strided_layers", c.discriminator.num_strided_layers},
      {"kernel", c.discriminator.kernel},
      {"leaky_slope", c.discriminator.leaky_slope},
      {"init_scale", c.discriminator.init_scale},
      {"normalization",
       c.discriminator.normalization == Normalization::instance ? "instance" : "none"}};
  j["hyperparams"] = {{"total_epochs", c.hyper.total_epochs},
                      {"initial_lr", c.hyper.initial_lr},
                      {"batch_size", c.hyper.batch_size},
                      {"l1_weight", c.hyper.l1_weight},
                      {"optimizer_betas", {c.hyper.beta1, c.hyper.beta2}},
                      {"lr_decay", c.hyper.decay == LrDecay::linear ? "linear"
                                                                    : "constant-then-linear"}};
  j["seed"] = c.hyper.seed;
  j["data_seed"] = c.data_seed;
  j["sites"] = {site_to_json(c.sites[0]), site_to_json(c.sites[1])};
  j["n_train"] = c.n_train;
  j["n_test"] = c.n_test;
  j["output_dir"] = c.output_dir.string();
  j["checkpoint_every"] = c.checkpoint_every;
  j["federation"] = {{"weighting", c.weighting == Weighting::dataset_size ? "dataset-size" : "equal"},
                     {"aggregate_discriminator", c.aggregate_discriminator},
                     {"local_epochs", c.local_epochs}};
  j["deterministic"] = c.deterministic;
  j["montage_rows"] = c.montage_rows;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  reject_unknown(j,
                 {"resolution", "generator", "discriminator", "hyperparams", "seed", "data_seed",
                  "sites", "n_train", "n_test", "output_dir", "checkpoint_every", "federation",
                  "deterministic", "montage_rows"},
                 "config");
  ExperimentConfig c;
  read(j, "resolution", c.generator.resolution);
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    reject_unknown(g,
                   {"input_channels", "output_channels", "base_channels", "channel_cap",
                    "dropout_rate", "init_scale"},
                   "generator");
    read(g, "input_channels", c.generator.input_channels);
    read(g, "output_channels", c.generator.output_channels);
    read(g, "base_channels", c.generator.base_channels);
    read(g, "channel_cap", c.generator.channel_cap);
    read(g, "dropout_rate", c.generator.dropout_rate);
    read(g, "init_scale", c.generator.init_scale);
  }
  c.discriminator.input_channels = c.generator.input_channels + c.generator.output_channels;
  if (j.contains("discriminator")) {
    const auto& d = j["discriminator"];
    reject_unknown(d,
                   {"base_channels", "num_strided_layers", "kernel", "leaky_slope", "init_scale",
                    "normalization"},
                   "discriminator");
    read(d, "base_channels", c.discriminator.base_channels);
    read(d, "num_strided_layers", c.discriminator.num_strided_layers);
    read(d, "kernel", c.discriminator.kernel);
    read(d, "leaky_slope", c.discriminator.leaky_slope);
    read(d, "init_scale", c.discriminator.init_scale);
    if (d.contains("normalization")) {
      std::string n;
      read(d, "normalization", n);
      if (n != "instance" && n != "none") throw ValidationError("normalization: instance|none");
      c.discriminator.normalization = n == "instance" ? Normalization::instance : Normalization::none;
    }
  }
  if (j.contains("hyperparams")) {
    const auto& h = j["hyperparams"];
    reject_unknown(h,
                   {"total_epochs", "initial_lr", "batch_size", "l1_weight", "optimizer_betas",
                    "lr_decay"},
                   "hyperparams");
    read(h, "total_epochs", c.hyper.total_epochs);
    read(h, "initial_lr", c.hyper.initial_lr);
    read(h, "batch_size", c.hyper.batch_size);
    read(h, "l1_weight", c.hyper.l1_weight);
    if (h.contains("optimizer_betas")) {
      std::array<double, 2> b{};
      read(h, "optimizer_betas", b);
      c.hyper.beta1 = b[0];
      c.hyper.beta2 = b[1];
    }
    if (h.contains("lr_decay")) {
      std::string d;
      read(h, "lr_decay", d);
      if (d != "linear" && d != "constant-then-linear") {
        throw ValidationError("lr_decay: linear|constant-then-linear");
      }
      c.hyper.decay = d == "linear" ? LrDecay::linear : LrDecay::constant_then_linear;
    }
  }
  read(j, "seed", c.hyper.seed);
  read(j, "data_seed", c.data_seed);
  if (j.contains("sites")) {
    const auto& s = j["sites"];
    if (!s.is_array() || s.size() != 2) throw ValidationError("sites must list exactly two profiles");
    c.sites[0] = site_from_json(s[0], c.sites[0]);
    c.sites[1] = site_from_json(s[1], c.sites[1]);
  }
  read(j, "n_train", c.n_train);
  read(j, "n_test", c.n_test);
  if (j.contains("output_dir")) {
    std::string out;
    read(j, "output_dir", out);
    c.output_dir = out;
  }
  read(j, "checkpoint_every", c.checkpoint_every);
  if (j.contains("federation")) {
    const auto& f = j["federation"];
    reject_unknown(f, {"weighting", "aggregate_discriminator", "local_epochs"}, "federation");
    if (f.contains("weighting")) {
      std::string w;
      read(f, "weighting", w);
      if (w != "dataset-size" && w != "equal") throw ValidationError("weighting: dataset-size|equal");
      c.weighting = w == "equal" ? Weighting::equal : Weighting::dataset_size;
    }
    read(f, "aggregate_discriminator", c.aggregate_discriminator);
    read(f, "local_epochs", c.local_epochs);
  }
  read(j, "deterministic", c.deterministic);
  read(j, "montage_rows", c.montage_rows);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError("config " + path.string() + " is not valid JSON");
  return config_from_json(j);
}

json training_fingerprint(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output_dir");
  j.erase("checkpoint_every");
  j.erase("montage_rows");
  j.erase("deterministic");
  return j;
}

}  // namespace fedsynth::cli
