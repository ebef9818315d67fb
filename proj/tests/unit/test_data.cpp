#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "fedsynth/data/corpus.hpp"
#include "fedsynth/data/phantom.hpp"
#include "helpers.hpp"

using namespace fedsynth;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fedsynth-data-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

double masked_mean(const Image& img, const Mask& mask) {
  double sum = 0.0;
  Index n = 0;
  for (Index i = 0; i < img.size(); ++i) {
    if (mask.data()[i]) {
      sum += img.data()[i];
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

Image site_mean(const std::vector<SlicePair>& pairs) {
  Image mean = Image::Zero(pairs.front().source.rows(), pairs.front().source.cols());
  for (const auto& p : pairs) mean += p.source;
  return mean / static_cast<float>(pairs.size());
}

RawImage ramp(Index rows, Index cols, std::uint16_t step) {
  RawImage r(rows, cols);
  for (Index i = 0; i < r.size(); ++i) r.data()[i] = static_cast<std::uint16_t>(i * step);
  return r;
}

}  // namespace

TEST_CASE("phantoms are deterministic per seed and profile") {
  SiteProfile p = testing::quiet_profile();
  p.noise_sigma = 0.05;
  std::mt19937_64 a(42);
  std::mt19937_64 b(42);
  const auto x = generate_phantom_pair(a, p, 64);
  const auto y = generate_phantom_pair(b, p, 64);
  CHECK(x.source == y.source);
  CHECK(x.target == y.target);
  validate_slice_pair(x);
}

TEST_CASE("full suppression darkens the rim") {
  SiteProfile p = testing::quiet_profile();
  p.suppression_factor = 1.0;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const auto ph = generate_phantom(rng, p, 64);
    REQUIRE(ph.rim.count() > 0);
    CHECK(masked_mean(ph.pair.source, ph.rim) >= 0.8);
    CHECK(masked_mean(ph.pair.target, ph.rim) <= 0.05);
  }
}

TEST_CASE("no suppression, no noise and no fluid gives identical images") {
  SiteProfile p = testing::quiet_profile();
  p.suppression_factor = 0.0;
  p.min_fluid_pockets = p.max_fluid_pockets = 0;
  std::mt19937_64 rng(6);
  for (auto orientation : {Orientation::deg0, Orientation::deg90}) {
    p.orientation = orientation;
    p.contrast_gamma = orientation == Orientation::deg0 ? 1.0 : 1.7;
    const auto pair = generate_phantom_pair(rng, p, 32);
    CHECK(pair.source == pair.target);
  }
}

TEST_CASE("rotation transposes the anatomy consistently") {
  SiteProfile upright = testing::quiet_profile();
  SiteProfile rotated = upright;
  rotated.orientation = Orientation::deg90;
  std::mt19937_64 a(8);
  std::mt19937_64 b(8);
  const auto u = generate_phantom(a, upright, 32);
  const auto r = generate_phantom(b, rotated, 32);
  const Image turned = u.pair.source.transpose().colwise().reverse();
  CHECK(r.pair.source.isApprox(turned));
  CHECK(r.rim == Mask(u.rim.transpose().colwise().reverse()));
}

TEST_CASE("images stay inside [0, 1] under heavy noise") {
  SiteProfile p = testing::quiet_profile();
  p.noise_sigma = 0.5;
  p.contrast_gamma = 2.5;
  std::mt19937_64 rng(9);
  const auto pair = generate_phantom_pair(rng, p, 32);
  CHECK(pair.source.minCoeff() >= 0.0f);
  CHECK(pair.source.maxCoeff() <= 1.0f);
  CHECK(pair.target.allFinite());
}

TEST_CASE("site datasets use disjoint anatomy seeds") {
  const auto d = generate_site_dataset(testing::quiet_profile(), 80, 20, 16, 3);
  CHECK(d.train.size() == 80);
  CHECK(d.test.size() == 20);
  std::set<std::string> train_ids;
  for (const auto& p : d.train) train_ids.insert(p.pair_id);
  CHECK(train_ids.size() == 80);
  for (const auto& p : d.test) CHECK_FALSE(train_ids.contains(p.pair_id));
  const auto again = generate_site_dataset(testing::quiet_profile(), 80, 20, 16, 3);
  CHECK(again.train.front().source == d.train.front().source);
  CHECK(again.test.back().pair_id == d.test.back().pair_id);
}

TEST_CASE("seed range exhaustion and invalid sizes are errors") {
  SiteProfile p = testing::quiet_profile();
  p.anatomy_seed_begin = 10;
  p.anatomy_seed_end = 15;
  CHECK_THROWS_AS(generate_site_dataset(p, 4, 2, 16, 1), ValidationError);
  CHECK_NOTHROW(generate_site_dataset(p, 3, 2, 16, 1));
  CHECK_THROWS_AS(generate_site_dataset(p, 0, 2, 16, 1), ValidationError);
  CHECK_THROWS_AS(generate_site_dataset(p, 2, 0, 16, 1), ValidationError);
}

TEST_CASE("distinct site profiles shift the image distribution") {
  SiteProfile a = testing::quiet_profile("A");
  a.noise_sigma = 0.02;
  SiteProfile b = a;
  b.site_id = "B";
  b.contrast_gamma = 1.8;
  b.orientation = Orientation::deg90;
  b.anatomy_seed_begin = 100000;
  b.anatomy_seed_end = 200000;
  const auto da = generate_site_dataset(a, 80, 1, 64, 11);
  const auto db = generate_site_dataset(b, 80, 1, 64, 12);
  const double shift = (site_mean(da.train) - site_mean(db.train)).cwiseAbs().mean();
  CHECK(shift > 0.01);
}

TEST_CASE("model range maps") {
  Image x(1, 3);
  x << 0.0f, 1.0f, 0.5f;
  const Image m = to_model_range(x);
  CHECK(m(0, 0) == -1.0f);
  CHECK(m(0, 1) == 1.0f);
  CHECK(m(0, 2) == 0.0f);
  CHECK(Image(from_model_range(Image::Constant(1, 1, -1.0f)))(0, 0) == 0.0f);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Image r(16, 16);
  for (Index i = 0; i < r.size(); ++i) r.data()[i] = u(rng);
  CHECK((Image(from_model_range(to_model_range(r))) - r).cwiseAbs().maxCoeff() <= 1e-7f);
}

TEST_CASE("slice pair validation") {
  SlicePair p;
  p.source = Image::Zero(4, 4);
  p.target = Image::Zero(4, 5);
  CHECK_THROWS_AS(validate_slice_pair(p), ShapeError);
  p.target = Image::Constant(4, 4, 1.5f);
  CHECK_THROWS_AS(validate_slice_pair(p), ValidationError);
}

TEST_CASE("8-bit images normalize with 255 mapping to 1") {
  RawImage r(1, 256);
  for (Index i = 0; i < 256; ++i) r(0, i) = static_cast<std::uint16_t>(i);
  const Image n = normalize_min_max(r);
  CHECK(n(0, 0) == 0.0f);
  CHECK(n(0, 255) == 1.0f);
  CHECK(n(0, 51) == doctest::Approx(0.2));
}

TEST_CASE("constant images normalize to zeros with a flag") {
  bool constant = false;
  const Image n = normalize_min_max(RawImage::Constant(3, 3, 77), &constant);
  CHECK(constant);
  CHECK(n.isZero(0.0));
}

TEST_CASE("PNG round trips at 8 and 16 bits") {
  TempDir dir;
  for (int depth : {8, 16}) {
    const RawImage img = ramp(5, 7, depth == 8 ? 7 : 1800);
    const auto path = dir.path / ("img" + std::to_string(depth) + ".png");
    write_gray_png(path, img, depth);
    const auto back = read_gray_png(path);
    CHECK(back.bit_depth == depth);
    CHECK(back.pixels == img);
  }
  CHECK_THROWS_AS(read_gray_png(dir.path / "missing.png"), ValidationError);
  std::ofstream(dir.path / "junk.png") << "not a png";
  CHECK_THROWS_AS(read_gray_png(dir.path / "junk.png"), ValidationError);
}

TEST_CASE("loader matches pairs by name and skips unmatched files") {
  TempDir dir;
  fs::create_directories(dir.path / "source");
  fs::create_directories(dir.path / "target");
  for (const char* name : {"c", "a", "b"}) {
    write_gray_png(dir.path / "source" / (std::string(name) + ".png"), ramp(4, 4, 9), 8);
    write_gray_png(dir.path / "target" / (std::string(name) + ".png"), ramp(4, 4, 3), 8);
  }
  write_gray_png(dir.path / "source" / "lonely.png", ramp(4, 4, 1), 8);
  const auto loaded = load_paired_dataset(dir.path, "S");
  REQUIRE(loaded.pairs.size() == 3);
  CHECK(loaded.skipped == 1);
  CHECK(loaded.pairs[0].pair_id == "a");
  CHECK(loaded.pairs[2].pair_id == "c");
  CHECK(loaded.pairs[1].site_id == "S");
  CHECK(loaded.pairs[0].source.maxCoeff() == 1.0f);
  CHECK_FALSE(loaded.warnings.empty());
}

TEST_CASE("loader errors") {
  TempDir dir;
  CHECK_THROWS_AS(load_paired_dataset(dir.path, "S"), ValidationError);
  fs::create_directories(dir.path / "source");
  fs::create_directories(dir.path / "target");
  write_gray_png(dir.path / "source" / "x.png", ramp(4, 4, 1), 8);
  write_gray_png(dir.path / "target" / "x.png", ramp(4, 5, 1), 8);
  CHECK_THROWS_AS(load_paired_dataset(dir.path, "S"), ShapeError);
}

TEST_CASE("written corpora reload to the same images up to 16-bit quantization") {
  TempDir dir;
  SiteProfile p = testing::quiet_profile();
  p.noise_sigma = 0.02;
  const auto data = generate_site_dataset(p, 3, 1, 32, 4);
  const auto entries = write_corpus(dir.path, data.train);
  CHECK(entries.size() == 3);
  CHECK(read_manifest(dir.path / kManifestName) == entries);
  for (const auto& e : entries) {
    const std::vector<fs::path> files = {dir.path / e.source, dir.path / e.target};
    CHECK(file_checksum(files) == e.checksum);
  }
  const auto loaded = load_paired_dataset(dir.path, "A");
  REQUIRE(loaded.pairs.size() == 3);
  for (const auto& pair : loaded.pairs) {
    const auto it = std::find_if(data.train.begin(), data.train.end(),
                                 [&](const SlicePair& s) { return s.pair_id == pair.pair_id; });
    REQUIRE(it != data.train.end());
    // Per-image min-max renormalization on load: compare after rescaling.
    const Image expected = (it->source.array() - it->source.minCoeff()) /
                           (it->source.maxCoeff() - it->source.minCoeff());
    CHECK((pair.source - expected).cwiseAbs().maxCoeff() < 1e-4f);
  }
}
