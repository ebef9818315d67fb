#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "fedsynth/nn/tensor.hpp"

namespace fedsynth {

/// Grayscale image, rows = height. Stored intensities live in [0, 1].
using Image = Eigen::MatrixXf;

/// One registered (source, target) pair.
struct SlicePair {
  Image source;
  Image target;
  std::string pair_id;
  std::string site_id;
};

/// Throws ValidationError unless both images share dimensions and lie in [0, 1].
void validate_slice_pair(const SlicePair& pair);

/// [0, 1] storage range to the generator's (-1, 1) range: 2x - 1.
template <typename Derived>
auto to_model_range(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (x.array() * S(2) - S(1)).matrix();
}

/// Inverse of to_model_range: (x + 1) / 2.
template <typename Derived>
auto from_model_range(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return ((x.array() + S(1)) / S(2)).matrix();
}

/// Single-channel feature map holding `image` mapped to model range.
template <typename Scalar>
FeatureMap<Scalar> to_feature_map(const Image& image) {
  FeatureMap<Scalar> f(1, image.rows(), image.cols());
  f.plane(0) = to_model_range(image).template cast<Scalar>();
  return f;
}

/// Channel 0 of `f` mapped back to [0, 1] storage range (clamped).
template <typename Scalar>
Image to_image(const FeatureMap<Scalar>& f) {
  return from_model_range(f.plane(0)).template cast<float>().cwiseMax(0.0f).cwiseMin(1.0f);
}

}  // namespace fedsynth
