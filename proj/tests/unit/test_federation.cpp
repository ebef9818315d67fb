#include "doctest.h"

#include <sys/socket.h>
#include <unistd.h>

#include <random>
#include <sstream>
#include <thread>

#include "fedsynth/federation/experiment.hpp"
#include "fedsynth/federation/transport.hpp"
#include "helpers.hpp"

using namespace fedsynth;

namespace {

ParameterSet single(const std::string& name, std::vector<float> values) {
  ParameterSet s;
  const auto n = static_cast<std::int64_t>(values.size());
  s.add({name, {n}, std::move(values)});
  return s;
}

struct Setup {
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  Hyperparams hyper;

  Setup() {
    generator.resolution = 16;
    generator.base_channels = 2;
    generator.channel_cap = 8;
    discriminator.base_channels = 2;
    discriminator.num_strided_layers = 1;
    hyper.total_epochs = 10;
    hyper.seed = 3;
  }

  std::vector<SlicePair> data(std::uint64_t seed, int n, const std::string& site = "A") const {
    std::mt19937_64 rng(seed);
    std::vector<SlicePair> out;
    for (int i = 0; i < n; ++i) {
      auto p = generate_phantom_pair(rng, testing::quiet_profile(site), 16);
      p.pair_id = site + "-" + std::to_string(i);
      out.push_back(std::move(p));
    }
    return out;
  }

  ClientState client(const std::string& id, std::vector<SlicePair> d, std::uint64_t seed) const {
    Hyperparams h = hyper;
    h.seed = seed;
    return {id, std::move(d), Pix2PixModel<float>(generator, discriminator, h, hyper.seed)};
  }

  std::vector<ClientState> two_clients() const {
    std::vector<ClientState> c;
    c.push_back(client("A", data(1, 3, "A"), hyper.seed));
    c.push_back(client("B", data(2, 5, "B"), hyper.seed + 1));
    return c;
  }
};

}  // namespace

TEST_CASE("aggregation of two clients with equal weights is the mean") {
  const std::vector<ParameterSet> sets = {single("w", {1, 2}), single("w", {3, 4})};
  const std::vector<double> w = {0.5, 0.5};
  CHECK(fedgan_aggregate(sets, w) == single("w", {2, 3}));
}

TEST_CASE("weighted aggregation") {
  const std::vector<ParameterSet> sets = {single("w", {0}), single("w", {4})};
  const std::vector<double> w = {0.25, 0.75};
  CHECK(fedgan_aggregate(sets, w).entries()[0].values[0] == 3.0f);
}

TEST_CASE("single client aggregation is the identity") {
  std::mt19937_64 rng(4);
  std::normal_distribution<float> n(0.0f, 3.0f);
  std::vector<float> v(257);
  for (auto& x : v) x = n(rng);
  const std::vector<ParameterSet> sets = {single("w", v)};
  const std::vector<double> w = {1.0};
  CHECK(fedgan_aggregate(sets, w) == sets[0]);
}

TEST_CASE("aggregation errors") {
  const std::vector<ParameterSet> sets = {single("w", {1, 2}), single("w", {3})};
  const std::vector<double> w = {0.5, 0.5};
  CHECK_THROWS_AS(fedgan_aggregate(sets, w), ShapeError);
  const std::vector<ParameterSet> ok = {single("w", {1}), single("w", {3})};
  const std::vector<double> negative = {-0.5, 1.5};
  const std::vector<double> zero = {0.0, 0.0};
  const std::vector<double> short_w = {1.0};
  CHECK_THROWS_AS(fedgan_aggregate(ok, negative), ValidationError);
  CHECK_THROWS_AS(fedgan_aggregate(ok, zero), ValidationError);
  CHECK_THROWS_AS(fedgan_aggregate(ok, short_w), ValidationError);
  CHECK_THROWS_AS(fedgan_aggregate(std::span<const ParameterSet>{}, std::span<const double>{}),
                  ValidationError);
}

TEST_CASE("aggregation is convex and idempotent on random cases") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> clients(1, 5);
  std::uniform_int_distribution<int> size(1, 40);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::normal_distribution<float> value(0.0f, 10.0f);
  for (int c = 0; c < 1000; ++c) {
    const int k = clients(rng);
    const int n = size(rng);
    std::vector<ParameterSet> sets;
    std::vector<double> w;
    for (int i = 0; i < k; ++i) {
      std::vector<float> v(n);
      for (auto& x : v) x = value(rng);
      sets.push_back(single("p", v));
      w.push_back(weight(rng) + 1e-3);
    }
    const auto out = fedgan_aggregate(sets, w);
    for (int j = 0; j < n; ++j) {
      float lo = sets[0].entries()[0].values[j];
      float hi = lo;
      for (const auto& s : sets) {
        lo = std::min(lo, s.entries()[0].values[j]);
        hi = std::max(hi, s.entries()[0].values[j]);
      }
      const float y = out.entries()[0].values[j];
      REQUIRE(y >= lo);
      REQUIRE(y <= hi);
    }
    const std::vector<ParameterSet> same(k, sets[0]);
    REQUIRE(fedgan_aggregate(same, w) == sets[0]);
  }
}

TEST_CASE("aggregation weights") {
  const std::vector<std::size_t> sizes = {80, 20};
  const auto w = aggregation_weights(sizes, Weighting::dataset_size);
  CHECK(w[0] == 80.0 / 100.0);
  CHECK(w[1] == 20.0 / 100.0);
  const auto e = aggregation_weights(sizes, Weighting::equal);
  CHECK(e == std::vector<double>{0.5, 0.5});
  const std::vector<std::size_t> empty_client = {3, 0};
  CHECK_THROWS_AS(aggregation_weights(empty_client, Weighting::dataset_size), ValidationError);
}

TEST_CASE("a round broadcasts the aggregate to every client") {
  const Setup s;
  auto clients = s.two_clients();
  const auto record = run_round(clients, 0);
  CHECK(record.round_index == 0);
  CHECK(record.client_ids == std::vector<std::string>{"A", "B"});
  CHECK(record.weights[0] + record.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(record.weights[0] == 3.0 / 8.0);
  for (const auto& c : clients) {
    CHECK(c.model.generator.export_parameters() == record.aggregated_generator);
    CHECK(c.model.discriminator.export_parameters() == record.aggregated_discriminator);
  }
  CHECK(record.aggregate_hash == parameter_hash(record.aggregated_generator));
  CHECK(record.client_hashes.size() == 2);
}

TEST_CASE("discriminators can stay local") {
  const Setup s;
  auto clients = s.two_clients();
  FederationOptions options;
  options.aggregate_discriminator = false;
  const auto record = run_round(clients, 0, options);
  CHECK(record.aggregated_discriminator.empty());
  CHECK(clients[0].model.generator.export_parameters() ==
        clients[1].model.generator.export_parameters());
  CHECK_FALSE(clients[0].model.discriminator.export_parameters() ==
              clients[1].model.discriminator.export_parameters());
}

TEST_CASE("one client federated training equals centralized training bit-for-bit") {
  const Setup s;
  const auto data = s.data(7, 3);
  for (std::int64_t n : {1, 3, 10}) {
    std::vector<ClientState> clients;
    clients.push_back(s.client("A", data, s.hyper.seed));
    const auto result = run_federated_training(clients, n);
    CHECK(result.rounds.size() == static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < result.rounds.size(); ++r) {
      CHECK(result.rounds[r].round_index == static_cast<std::int64_t>(r));
    }

    Pix2PixModel<float> central(s.generator, s.discriminator, s.hyper, s.hyper.seed);
    run_local_training(central, data, n);
    CHECK(result.generator == central.generator.export_parameters());
    CHECK(result.discriminator == central.discriminator.export_parameters());
  }
}

TEST_CASE("identical clients aggregate to the common post-epoch parameters") {
  const Setup s;
  const auto data = s.data(9, 3);
  std::vector<ClientState> clients;
  clients.push_back(s.client("A", data, s.hyper.seed));
  clients.push_back(s.client("B", data, s.hyper.seed));
  Pix2PixModel<float> solo(s.generator, s.discriminator, s.hyper, s.hyper.seed);
  train_local_epoch(solo, data, 0);
  const auto record = run_round(clients, 0);
  CHECK(record.aggregated_generator == solo.generator.export_parameters());
  CHECK(record.aggregated_discriminator == solo.discriminator.export_parameters());
  CHECK(record.client_hashes[0] == record.client_hashes[1]);
}

TEST_CASE("threaded clients give the same result as sequential clients") {
  const Setup s;
  auto sequential = s.two_clients();
  auto threaded = s.two_clients();
  FederationOptions parallel;
  parallel.deterministic = false;
  for (std::int64_t r = 0; r < 2; ++r) {
    const auto a = run_round(sequential, r);
    const auto b = run_round(threaded, r, parallel);
    CHECK(a.aggregated_generator == b.aggregated_generator);
    CHECK(a.aggregated_discriminator == b.aggregated_discriminator);
  }
}

TEST_CASE("client failures name the client") {
  const Setup s;
  auto clients = s.two_clients();
  clients[1].dataset.clear();
  CHECK_THROWS_WITH_AS(run_round(clients, 0), doctest::Contains("'B'"), ValidationError);
  CHECK_THROWS_AS(run_federated_training(clients, 0), ValidationError);
}

TEST_CASE("round log records weights and hashes") {
  const Setup s;
  auto clients = s.two_clients();
  std::ostringstream rounds;
  std::ostringstream epochs;
  FederationOptions options;
  options.round_log = &rounds;
  options.epoch_log = &epochs;
  const auto record = run_round(clients, 4, options);
  CHECK(rounds.str() == format_round_csv(record) + "\n");
  CHECK(rounds.str().rfind("4,0.375;0.625,", 0) == 0);
  CHECK(epochs.str().rfind("A,4,", 0) == 0);
  CHECK(epochs.str().find("\nB,4,") != std::string::npos);
}

TEST_CASE("multiple local epochs per round") {
  Setup s;
  auto clients = s.two_clients();
  FederationOptions options;
  options.local_epochs = 2;
  const auto record = run_round(clients, 1, options);
  CHECK(record.client_stats[0].epoch == 3);
}

TEST_CASE("experiment matrix report has eight cells") {
  Setup s;
  s.hyper.total_epochs = 1;
  ExperimentSettings settings;
  settings.generator = s.generator;
  settings.discriminator = s.discriminator;
  settings.hyper = s.hyper;
  const auto a = s.data(1, 3, "A");
  const auto b = s.data(2, 3, "B");
  const auto ta = s.data(3, 2, "A");
  const auto tb = s.data(4, 2, "B");
  const auto report = run_experiment_matrix(a, b, ta, tb, settings);
  for (std::size_t t = 0; t < kTestSetCount; ++t) {
    for (std::size_t m = 0; m < kModelCount; ++m) {
      CHECK(report.cell(t, m).ssim.size() == 2);
      CHECK(report.cell(t, m).sd.has_value());
    }
    CHECK(report.p_values[t](0, 0) == 1.0);
    CHECK(report.p_values[t] == report.p_values[t].transpose());
  }
  CHECK_THROWS_AS(run_experiment_matrix(a, std::span<const SlicePair>{}, ta, tb, settings),
                  ValidationError);
}

TEST_CASE("transport messages round-trip") {
  const Setup s;
  const auto g = Generator(s.generator, 1).export_parameters();
  const auto d = Discriminator(s.discriminator, 1).export_parameters();
  const Message messages[] = {RoundBegin{7, g.with_prefix("generator.")},
                              Submit{"B", 42, g, d}, RoundResult{g, ParameterSet{}}};
  for (const auto& m : messages) {
    const std::string frame = encode_message(m);
    const Message back = decode_message(std::string_view(frame).substr(4));
    CHECK(back.index() == m.index());
    CHECK(encode_message(back) == frame);
  }
  CHECK_THROWS_AS(decode_message(std::string("\x09", 1)), ValidationError);
}

TEST_CASE("a round over stream sockets matches the in-process round") {
  const Setup s;
  auto local = s.two_clients();
  auto remote = s.two_clients();
  FederationOptions options;

  int fds[2][2];
  for (auto& pair : fds) REQUIRE(socketpair(AF_UNIX, SOCK_STREAM, 0, pair) == 0);
  StreamChannel server_side[2] = {StreamChannel(fds[0][0]), StreamChannel(fds[1][0])};
  StreamChannel client_side[2] = {StreamChannel(fds[0][1]), StreamChannel(fds[1][1])};
  StreamChannel* channels[2] = {&server_side[0], &server_side[1]};

  ParameterSet generator = remote[0].model.generator.export_parameters();
  ParameterSet discriminator = remote[0].model.discriminator.export_parameters();
  for (std::int64_t r = 0; r < 2; ++r) {
    const auto expected = run_round(local, r, options);
    std::vector<std::jthread> workers;
    for (int k = 0; k < 2; ++k) {
      workers.emplace_back([&, k] { client_round(client_side[k], remote[k], options); });
    }
    const auto record = serve_round(channels, r, generator, discriminator, options);
    workers.clear();
    CHECK(record.aggregated_generator == expected.aggregated_generator);
    CHECK(record.aggregated_discriminator == expected.aggregated_discriminator);
    CHECK(record.weights == expected.weights);
    CHECK(record.client_hashes == expected.client_hashes);
    generator = record.aggregated_generator;
    discriminator = record.aggregated_discriminator;
    for (int k = 0; k < 2; ++k) {
      CHECK(remote[k].model.generator.export_parameters() == expected.aggregated_generator);
    }
  }
  for (auto& pair : fds) {
    close(pair[0]);
    close(pair[1]);
  }
}
