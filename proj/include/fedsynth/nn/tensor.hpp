#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "fedsynth/errors.hpp"

namespace fedsynth {

using Index = Eigen::Index;

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Activations of one sample. Each row of `data` is one channel holding a
/// row-major height x width plane.
template <typename Scalar>
struct FeatureMap {
  Index height = 0;
  Index width = 0;
  RowMatrix<Scalar> data;

  FeatureMap() = default;
  FeatureMap(Index channels, Index h, Index w)
      : height(h), width(w), data(RowMatrix<Scalar>::Zero(channels, h * w)) {}

  Index channels() const { return data.rows(); }
  Index pixels() const { return height * width; }

  Scalar& at(Index c, Index y, Index x) { return data(c, y * width + x); }
  Scalar at(Index c, Index y, Index x) const { return data(c, y * width + x); }

  Eigen::Map<RowMatrix<Scalar>> plane(Index c) {
    return Eigen::Map<RowMatrix<Scalar>>(data.data() + c * pixels(), height, width);
  }
  Eigen::Map<const RowMatrix<Scalar>> plane(Index c) const {
    return Eigen::Map<const RowMatrix<Scalar>>(data.data() + c * pixels(), height, width);
  }

  bool same_shape(const FeatureMap& other) const {
    return height == other.height && width == other.width && channels() == other.channels();
  }
};

/// A batch is a list of per-sample feature maps with identical shapes.
template <typename Scalar>
using Batch = std::vector<FeatureMap<Scalar>>;

inline std::string shape_string(Index n, Index c, Index h, Index w) {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
         std::to_string(w) + ")";
}

template <typename Scalar>
std::string shape_string(const Batch<Scalar>& batch) {
  if (batch.empty()) return "(0)";
  const auto& f = batch.front();
  return shape_string(static_cast<Index>(batch.size()), f.channels(), f.height, f.width);
}

template <typename Scalar>
void require_uniform(const Batch<Scalar>& batch, const char* what) {
  if (batch.empty()) throw ShapeError(std::string(what) + ": empty batch");
  for (const auto& f : batch) {
    if (!f.same_shape(batch.front())) throw ShapeError(std::string(what) + ": ragged batch");
  }
}

template <typename Scalar>
void require_same_shape(const Batch<Scalar>& a, const Batch<Scalar>& b, const char* what) {
  require_uniform(a, what);
  require_uniform(b, what);
  if (a.size() != b.size() || !a.front().same_shape(b.front())) {
    throw ShapeError(std::string(what) + ": shape mismatch " + shape_string(a) + " vs " +
                     shape_string(b));
  }
}

template <typename Scalar>
bool all_finite(const Batch<Scalar>& batch) {
  for (const auto& f : batch) {
    if (!f.data.allFinite()) return false;
  }
  return true;
}

}  // namespace fedsynth
