#include "fedsynth/data/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "fedsynth/errors.hpp"

namespace fedsynth {

void SiteProfile::validate() const {
  if (site_id.empty()) throw ValidationError("site_id must not be empty");
  if (!(contrast_gamma > 0.0)) throw ValidationError("contrast_gamma must be > 0");
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be >= 0");
  if (!(suppression_factor >= 0.0 && suppression_factor <= 1.0)) {
    throw ValidationError("suppression_factor must lie in [0, 1]");
  }
  if (anatomy_seed_end <= anatomy_seed_begin) throw ValidationError("empty anatomy seed range");
  if (min_fluid_pockets < 0 || max_fluid_pockets < min_fluid_pockets) {
    throw ValidationError("invalid fluid pocket range");
  }
}

namespace {

struct Ellipse {
  double cx, cy, a, b, angle;

  /// Normalized radius: < 1 inside.
  double radius(double x, double y) const {
    const double c = std::cos(angle), s = std::sin(angle);
    const double dx = x - cx, dy = y - cy;
    const double u = (c * dx + s * dy) / a;
    const double v = (-s * dx + c * dy) / b;
    return std::sqrt(u * u + v * v);
  }
};

template <typename M>
M rotate90(const M& m) {
  // Counter-clockwise quarter turn: out(i, j) = in(j, n - 1 - i).
  return m.transpose().colwise().reverse();
}

}  // namespace

Phantom generate_phantom(std::mt19937_64& rng, const SiteProfile& profile, Index resolution) {
  profile.validate();
  if (resolution < 8) throw ValidationError("phantom resolution must be >= 8");
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  const Ellipse outer{uniform(-0.08, 0.08), uniform(-0.08, 0.08), uniform(0.62, 0.82),
                      uniform(0.36, 0.52), uniform(-0.25, 0.25)};
  const double thickness = uniform(0.72, 0.82);
  const Ellipse inner{outer.cx, outer.cy, outer.a * thickness, outer.b * thickness, outer.angle};
  const double rim_level = uniform(0.85, 1.0);
  const double tissue_level = uniform(0.25, 0.35);
  const double tex_fx = uniform(2.0, 5.0), tex_fy = uniform(2.0, 5.0);
  const double tex_phase = uniform(0.0, 2.0 * std::numbers::pi);

  const int pockets =
      std::uniform_int_distribution<int>(profile.min_fluid_pockets, profile.max_fluid_pockets)(rng);
  std::vector<Ellipse> fluid;
  std::vector<double> fluid_level;
  for (int k = 0; k < pockets; ++k) {
    const double r = uniform(0.0, 0.45);
    const double t = uniform(0.0, 2.0 * std::numbers::pi);
    const double lx = r * std::cos(t), ly = r * std::sin(t);
    const double c = std::cos(inner.angle), s = std::sin(inner.angle);
    const double px = inner.cx + inner.a * (c * lx) - inner.b * (s * ly);
    const double py = inner.cy + inner.a * (s * lx) + inner.b * (c * ly);
    fluid.push_back({px, py, inner.a * uniform(0.12, 0.25), inner.b * uniform(0.15, 0.3),
                     uniform(0.0, std::numbers::pi)});
    fluid_level.push_back(uniform(0.55, 0.70));
  }

  Image source = Image::Zero(resolution, resolution);
  Image target = Image::Zero(resolution, resolution);
  Mask rim = Mask::Constant(resolution, resolution, false);
  Mask fluid_mask = Mask::Constant(resolution, resolution, false);
  const double suppress = 1.0 - profile.suppression_factor;
  for (Index row = 0; row < resolution; ++row) {
    const double y = 2.0 * (static_cast<double>(row) + 0.5) / static_cast<double>(resolution) - 1.0;
    for (Index col = 0; col < resolution; ++col) {
      const double x =
          2.0 * (static_cast<double>(col) + 0.5) / static_cast<double>(resolution) - 1.0;
      if (outer.radius(x, y) >= 1.0) continue;
      if (inner.radius(x, y) >= 1.0) {
        rim(row, col) = true;
        source(row, col) = static_cast<float>(rim_level);
        target(row, col) = static_cast<float>(rim_level * suppress);
        continue;
      }
      double value = tissue_level + 0.04 * std::sin(tex_fx * x + tex_phase) * std::cos(tex_fy * y);
      double target_value = value;
      for (std::size_t k = 0; k < fluid.size(); ++k) {
        if (fluid[k].radius(x, y) < 1.0) {
          fluid_mask(row, col) = true;
          value = fluid_level[k];
          target_value = std::min(1.0, value + kFluidBrightening);
        }
      }
      source(row, col) = static_cast<float>(value);
      target(row, col) = static_cast<float>(target_value);
    }
  }

  if (profile.contrast_gamma != 1.0) {
    const auto gamma = static_cast<float>(profile.contrast_gamma);
    source = source.array().pow(gamma);
    target = target.array().pow(gamma);
  }
  if (profile.orientation == Orientation::deg90) {
    source = rotate90(source).eval();
    target = rotate90(target).eval();
    rim = rotate90(rim).eval();
    fluid_mask = rotate90(fluid_mask).eval();
  }
  if (profile.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, profile.noise_sigma);
    for (Image* img : {&source, &target}) {
      for (Index i = 0; i < img->size(); ++i) {
        const double v = static_cast<double>(img->data()[i]) + noise(rng);
        img->data()[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }

  Phantom out;
  out.pair.source = std::move(source);
  out.pair.target = std::move(target);
  out.pair.site_id = profile.site_id;
  out.rim = std::move(rim);
  out.fluid = std::move(fluid_mask);
  return out;
}

SiteDataset generate_site_dataset(const SiteProfile& profile, std::int64_t n_train,
                                  std::int64_t n_test, Index resolution, std::uint64_t seed) {
  profile.validate();
  if (n_train < 1 || n_test < 1) throw ValidationError("n_train and n_test must be >= 1");
  const std::int64_t span = profile.anatomy_seed_end - profile.anatomy_seed_begin;
  if (span < n_train + n_test) {
    throw ValidationError("anatomy seed range of site '" + profile.site_id + "' holds " +
                          std::to_string(span) + " seeds, " +
                          std::to_string(n_train + n_test) + " needed");
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> pick(profile.anatomy_seed_begin,
                                                   profile.anatomy_seed_end - 1);
  std::vector<std::int64_t> seeds;
  std::unordered_set<std::int64_t> used;
  while (static_cast<std::int64_t>(seeds.size()) < n_train + n_test) {
    const std::int64_t s = pick(rng);
    if (used.insert(s).second) seeds.push_back(s);
  }

  SiteDataset out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    std::mt19937_64 pair_rng(static_cast<std::uint64_t>(seeds[i]) * 0x9e3779b97f4a7c15ULL ^ seed);
    SlicePair pair = generate_phantom_pair(pair_rng, profile, resolution);
    pair.pair_id = profile.site_id + "-" + std::to_string(seeds[i]);
    (static_cast<std::int64_t>(i) < n_train ? out.train : out.test).push_back(std::move(pair));
  }
  return out;
}

}  // namespace fedsynth
