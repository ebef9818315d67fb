#pragma once

// Stateless building blocks for the convolutional networks. Everything here is
// a free function over FeatureMap / Batch so the layer classes stay thin and the
// gradient tests can exercise each op in isolation.

#include <Eigen/Core>

#include <cmath>
#include <random>

#include "fedsynth/nn/tensor.hpp"

namespace fedsynth::nn {

/// Geometry of a square-kernel convolution over a `channels x height x width`
/// image. Output size follows floor((n + 2p - k) / s) + 1.
struct ConvGeometry {
  Index channels = 0;
  Index height = 0;
  Index width = 0;
  Index kernel = 4;
  Index stride = 2;
  Index padding = 1;

  Index out_height() const { return (height + 2 * padding - kernel) / stride + 1; }
  Index out_width() const { return (width + 2 * padding - kernel) / stride + 1; }
  Index patch_size() const { return channels * kernel * kernel; }
};

inline Index conv_output_size(Index n, Index kernel, Index stride, Index padding) {
  return (n + 2 * padding - kernel) / stride + 1;
}

inline Index conv_transpose_output_size(Index n, Index kernel, Index stride, Index padding) {
  return (n - 1) * stride - 2 * padding + kernel;
}

/// Unfolds every kernel window into a column: result is
/// (channels*k*k) x (out_h*out_w), rows ordered (channel, ky, kx).
template <typename Scalar>
RowMatrix<Scalar> im2col(const FeatureMap<Scalar>& image, const ConvGeometry& g) {
  const Index oh = g.out_height();
  const Index ow = g.out_width();
  const Index k = g.kernel;
  RowMatrix<Scalar> cols(g.patch_size(), oh * ow);
  for (Index c = 0; c < g.channels; ++c) {
    const Scalar* src = image.data.data() + c * g.height * g.width;
    for (Index ky = 0; ky < k; ++ky) {
      for (Index kx = 0; kx < k; ++kx) {
        Scalar* dst = cols.data() + ((c * k + ky) * k + kx) * oh * ow;
        for (Index oy = 0; oy < oh; ++oy) {
          const Index iy = oy * g.stride - g.padding + ky;
          Scalar* row = dst + oy * ow;
          if (iy < 0 || iy >= g.height) {
            std::fill(row, row + ow, Scalar(0));
            continue;
          }
          const Scalar* line = src + iy * g.width;
          for (Index ox = 0; ox < ow; ++ox) {
            const Index ix = ox * g.stride - g.padding + kx;
            row[ox] = (ix >= 0 && ix < g.width) ? line[ix] : Scalar(0);
          }
        }
      }
    }
  }
  return cols;
}

/// Adjoint of im2col: scatters columns back onto the image grid, summing overlaps.
template <typename Scalar>
FeatureMap<Scalar> col2im(const RowMatrix<Scalar>& cols, const ConvGeometry& g) {
  const Index oh = g.out_height();
  const Index ow = g.out_width();
  const Index k = g.kernel;
  FeatureMap<Scalar> image(g.channels, g.height, g.width);
  for (Index c = 0; c < g.channels; ++c) {
    Scalar* dst = image.data.data() + c * g.height * g.width;
    for (Index ky = 0; ky < k; ++ky) {
      for (Index kx = 0; kx < k; ++kx) {
        const Scalar* src = cols.data() + ((c * k + ky) * k + kx) * oh * ow;
        for (Index oy = 0; oy < oh; ++oy) {
          const Index iy = oy * g.stride - g.padding + ky;
          if (iy < 0 || iy >= g.height) continue;
          const Scalar* row = src + oy * ow;
          Scalar* line = dst + iy * g.width;
          for (Index ox = 0; ox < ow; ++ox) {
            const Index ix = ox * g.stride - g.padding + kx;
            if (ix >= 0 && ix < g.width) line[ix] += row[ox];
          }
        }
      }
    }
  }
  return image;
}

// ---------------------------------------------------------------------------
// Convolution. `weight` is out x (in*k*k), matching the (out, in, k, k) layout.

template <typename Scalar>
FeatureMap<Scalar> conv2d_forward(const RowMatrix<Scalar>& cols,
                                  const Eigen::Ref<const RowMatrix<Scalar>>& weight,
                                  const Eigen::Ref<const Vector<Scalar>>& bias, Index out_h,
                                  Index out_w) {
  FeatureMap<Scalar> out;
  out.height = out_h;
  out.width = out_w;
  out.data.noalias() = weight * cols;
  out.data.colwise() += bias;
  return out;
}

// ---------------------------------------------------------------------------
// Transposed convolution. `weight` is in x (out*k*k), matching (in, out, k, k).
// The geometry describes the *output* image; its conv grid equals the input grid.

template <typename Scalar>
FeatureMap<Scalar> conv_transpose2d_forward(const FeatureMap<Scalar>& x,
                                            const Eigen::Ref<const RowMatrix<Scalar>>& weight,
                                            const Eigen::Ref<const Vector<Scalar>>& bias,
                                            const ConvGeometry& out_geometry) {
  RowMatrix<Scalar> cols;
  cols.noalias() = weight.transpose() * x.data;
  FeatureMap<Scalar> out = col2im(cols, out_geometry);
  out.data.colwise() += bias;
  return out;
}

// ---------------------------------------------------------------------------
// Instance normalization without affine parameters.

template <typename Scalar>
struct InstanceNormCache {
  RowMatrix<Scalar> normalized;
  Vector<Scalar> inv_std;
};

template <typename Scalar>
FeatureMap<Scalar> instance_norm_forward(const FeatureMap<Scalar>& x, Scalar eps,
                                         InstanceNormCache<Scalar>* cache) {
  FeatureMap<Scalar> out;
  out.height = x.height;
  out.width = x.width;
  const Vector<Scalar> mean = x.data.rowwise().mean();
  out.data = x.data.colwise() - mean;
  const Vector<Scalar> var = out.data.array().square().rowwise().mean();
  const Vector<Scalar> inv_std = (var.array() + eps).rsqrt();
  out.data = inv_std.asDiagonal() * out.data;
  if (cache != nullptr) {
    cache->normalized = out.data;
    cache->inv_std = inv_std;
  }
  return out;
}

template <typename Scalar>
FeatureMap<Scalar> instance_norm_backward(const FeatureMap<Scalar>& dy,
                                          const InstanceNormCache<Scalar>& cache) {
  FeatureMap<Scalar> dx;
  dx.height = dy.height;
  dx.width = dy.width;
  const Vector<Scalar> mean_dy = dy.data.rowwise().mean();
  const Vector<Scalar> mean_dy_xhat = (dy.data.array() * cache.normalized.array()).rowwise().mean();
  dx.data = dy.data.colwise() - mean_dy;
  dx.data -= mean_dy_xhat.asDiagonal() * cache.normalized;
  dx.data = cache.inv_std.asDiagonal() * dx.data;
  return dx;
}

// ---------------------------------------------------------------------------
// Pointwise activations over whole batches.

template <typename Scalar>
Batch<Scalar> leaky_relu(const Batch<Scalar>& x, Scalar slope) {
  Batch<Scalar> y = x;
  for (auto& f : y) f.data = f.data.array().max(f.data.array() * slope);
  return y;
}

template <typename Scalar>
Batch<Scalar> leaky_relu_backward(const Batch<Scalar>& dy, const Batch<Scalar>& x, Scalar slope) {
  Batch<Scalar> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    dx[i].data = (x[i].data.array() > Scalar(0)).select(dy[i].data, dy[i].data * slope);
  }
  return dx;
}

template <typename Scalar>
Batch<Scalar> tanh_forward(const Batch<Scalar>& x) {
  Batch<Scalar> y = x;
  for (auto& f : y) f.data = f.data.array().tanh();
  return y;
}

template <typename Scalar>
Batch<Scalar> tanh_backward(const Batch<Scalar>& dy, const Batch<Scalar>& y) {
  Batch<Scalar> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    dx[i].data = dy[i].data.array() * (Scalar(1) - y[i].data.array().square());
  }
  return dx;
}

/// Inverted dropout: kept units are scaled by 1/(1-rate) so inference is a no-op.
template <typename Scalar>
Batch<Scalar> dropout(const Batch<Scalar>& x, double rate, std::mt19937_64& rng,
                      Batch<Scalar>* mask_out) {
  Batch<Scalar> mask = x;
  std::bernoulli_distribution keep(1.0 - rate);
  const Scalar scale = rate < 1.0 ? Scalar(1.0 / (1.0 - rate)) : Scalar(0);
  for (auto& f : mask) {
    for (Index i = 0; i < f.data.size(); ++i) f.data.data()[i] = keep(rng) ? scale : Scalar(0);
  }
  Batch<Scalar> y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i].data.array() *= mask[i].data.array();
  if (mask_out != nullptr) *mask_out = std::move(mask);
  return y;
}

/// Channel concatenation [a; b] per sample.
template <typename Scalar>
Batch<Scalar> concat_channels(const Batch<Scalar>& a, const Batch<Scalar>& b) {
  if (a.size() != b.size()) throw ShapeError("concat_channels: batch size mismatch");
  Batch<Scalar> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].height != b[i].height || a[i].width != b[i].width) {
      throw ShapeError("concat_channels: spatial size mismatch");
    }
    out[i] = FeatureMap<Scalar>(a[i].channels() + b[i].channels(), a[i].height, a[i].width);
    out[i].data.topRows(a[i].channels()) = a[i].data;
    out[i].data.bottomRows(b[i].channels()) = b[i].data;
  }
  return out;
}

/// Splits a channel-concatenated gradient back into its leading `first` channels and the rest.
template <typename Scalar>
std::pair<Batch<Scalar>, Batch<Scalar>> split_channels(const Batch<Scalar>& x, Index first) {
  Batch<Scalar> a(x.size()), b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    a[i].height = b[i].height = x[i].height;
    a[i].width = b[i].width = x[i].width;
    a[i].data = x[i].data.topRows(first);
    b[i].data = x[i].data.bottomRows(x[i].channels() - first);
  }
  return {std::move(a), std::move(b)};
}

template <typename Scalar>
void accumulate(Batch<Scalar>& into, const Batch<Scalar>& delta) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i].data += delta[i].data;
}

}  // namespace fedsynth::nn
