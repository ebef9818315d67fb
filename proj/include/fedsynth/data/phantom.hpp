#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fedsynth/data/slice.hpp"

namespace fedsynth {

enum class Orientation { deg0, deg90 };

/// Acquisition characteristics of one synthetic site.
struct SiteProfile {
  std::string site_id = "A";
  double contrast_gamma = 1.0;
  Orientation orientation = Orientation::deg0;
  double noise_sigma = 0.0;
  /// Anatomy seeds are drawn from [anatomy_seed_begin, anatomy_seed_end).
  std::int64_t anatomy_seed_begin = 0;
  std::int64_t anatomy_seed_end = 100000;
  double suppression_factor = 0.9;
  int min_fluid_pockets = 1;
  int max_fluid_pockets = 3;

  void validate() const;
  bool operator==(const SiteProfile&) const = default;
};

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// A generated pair plus the region masks it was built from (after rotation).
struct Phantom {
  SlicePair pair;
  Mask rim;
  Mask fluid;
};

/// Procedural joint phantom. The source has a bright elliptical rim (the fat
/// analogue) around soft tissue holding fluid pockets; the target is the
/// same anatomy with the rim scaled by (1 - suppression_factor) and the fluid
/// brightened. Both images then receive the site's gamma, rotation and
/// independent clipped Gaussian noise.
Phantom generate_phantom(std::mt19937_64& rng, const SiteProfile& profile, Index resolution);

inline SlicePair generate_phantom_pair(std::mt19937_64& rng, const SiteProfile& profile,
                                       Index resolution) {
  return generate_phantom(rng, profile, resolution).pair;
}

struct SiteDataset {
  std::vector<SlicePair> train;
  std::vector<SlicePair> test;
};

/// Draws n_train + n_test distinct anatomy seeds from the profile's range
/// (train and test never share a seed) and renders one pair per seed.
SiteDataset generate_site_dataset(const SiteProfile& profile, std::int64_t n_train,
                                  std::int64_t n_test, Index resolution, std::uint64_t seed);

/// Brightness added to fluid pockets in the target.
inline constexpr double kFluidBrightening = 0.3;

}  // namespace fedsynth
