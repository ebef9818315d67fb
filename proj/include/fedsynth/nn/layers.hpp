#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fedsynth/nn/ops.hpp"

namespace fedsynth::nn {

/// A trainable tensor with its accumulated gradient. `shape` is the logical
/// layout exported to ParameterSet; storage is flat.
template <typename Scalar>
struct Parameter {
  std::string name;
  std::vector<Index> shape;
  Vector<Scalar> value;
  Vector<Scalar> grad;

  Parameter() = default;
  Parameter(std::string n, std::vector<Index> s) : name(std::move(n)), shape(std::move(s)) {
    Index size = 1;
    for (Index d : shape) size *= d;
    value = Vector<Scalar>::Zero(size);
    grad = Vector<Scalar>::Zero(size);
  }
};

template <typename Scalar>
void fill_gaussian(Parameter<Scalar>& p, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (Index i = 0; i < p.value.size(); ++i) p.value[i] = static_cast<Scalar>(dist(rng));
}

template <typename Scalar>
void zero_grad(const std::vector<Parameter<Scalar>*>& params) {
  for (auto* p : params) p->grad.setZero();
}

/// Strided 2-D convolution with bias.
template <typename Scalar>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const std::string& name, Index in_channels, Index out_channels, Index kernel,
         Index stride, Index padding)
      : in_channels_(in_channels),
        out_channels_(out_channels),
        kernel_(kernel),
        stride_(stride),
        padding_(padding),
        weight_(name + ".weight", {out_channels, in_channels, kernel, kernel}),
        bias_(name + ".bias", {out_channels}) {}

  Batch<Scalar> forward(const Batch<Scalar>& x) {
    require_uniform(x, "Conv2d");
    if (x.front().channels() != in_channels_) {
      throw ShapeError(weight_.name + ": expected " + std::to_string(in_channels_) +
                       " input channels, got " + std::to_string(x.front().channels()));
    }
    geometry_ = {in_channels_, x.front().height, x.front().width, kernel_, stride_, padding_};
    if (geometry_.out_height() < 1 || geometry_.out_width() < 1) {
      throw ShapeError(weight_.name + ": input " + shape_string(x) + " too small for kernel");
    }
    cols_.resize(x.size());
    Batch<Scalar> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      cols_[i] = im2col(x[i], geometry_);
      y[i] = conv2d_forward<Scalar>(cols_[i], weight_matrix(), bias_.value,
                                    geometry_.out_height(), geometry_.out_width());
    }
    return y;
  }

  /// Accumulates parameter gradients; returns the input gradient unless
  /// `need_input_grad` is false, in which case the result is empty.
  Batch<Scalar> backward(const Batch<Scalar>& dy, bool need_input_grad = true) {
    auto dw = weight_grad_matrix();
    Batch<Scalar> dx;
    if (need_input_grad) dx.resize(dy.size());
    for (std::size_t i = 0; i < dy.size(); ++i) {
      dw.noalias() += dy[i].data * cols_[i].transpose();
      bias_.grad += dy[i].data.rowwise().sum();
      if (need_input_grad) {
        RowMatrix<Scalar> dcols;
        dcols.noalias() = weight_matrix().transpose() * dy[i].data;
        dx[i] = col2im(dcols, geometry_);
      }
    }
    return dx;
  }

  std::vector<Parameter<Scalar>*> parameters() { return {&weight_, &bias_}; }
  std::vector<const Parameter<Scalar>*> parameters() const { return {&weight_, &bias_}; }

  Index in_channels() const { return in_channels_; }
  Index out_channels() const { return out_channels_; }
  Index kernel() const { return kernel_; }
  Index stride() const { return stride_; }
  Index padding() const { return padding_; }

 private:
  Eigen::Map<const RowMatrix<Scalar>> weight_matrix() const {
    return {weight_.value.data(), out_channels_, in_channels_ * kernel_ * kernel_};
  }
  Eigen::Map<RowMatrix<Scalar>> weight_grad_matrix() {
    return {weight_.grad.data(), out_channels_, in_channels_ * kernel_ * kernel_};
  }

  Index in_channels_ = 0;
  Index out_channels_ = 0;
  Index kernel_ = 4;
  Index stride_ = 2;
  Index padding_ = 1;
  Parameter<Scalar> weight_;
  Parameter<Scalar> bias_;
  ConvGeometry geometry_;
  std::vector<RowMatrix<Scalar>> cols_;
};

/// Transposed convolution (fractionally strided), the adjoint of Conv2d's
/// data path. Weight layout is (in, out, k, k).
template <typename Scalar>
class ConvTranspose2d {
 public:
  ConvTranspose2d() = default;
  ConvTranspose2d(const std::string& name, Index in_channels, Index out_channels, Index kernel,
                  Index stride, Index padding)
      : in_channels_(in_channels),
        out_channels_(out_channels),
        kernel_(kernel),
        stride_(stride),
        padding_(padding),
        weight_(name + ".weight", {in_channels, out_channels, kernel, kernel}),
        bias_(name + ".bias", {out_channels}) {}

  Batch<Scalar> forward(const Batch<Scalar>& x) {
    require_uniform(x, "ConvTranspose2d");
    if (x.front().channels() != in_channels_) {
      throw ShapeError(weight_.name + ": expected " + std::to_string(in_channels_) +
                       " input channels, got " + std::to_string(x.front().channels()));
    }
    const Index oh = conv_transpose_output_size(x.front().height, kernel_, stride_, padding_);
    const Index ow = conv_transpose_output_size(x.front().width, kernel_, stride_, padding_);
    geometry_ = {out_channels_, oh, ow, kernel_, stride_, padding_};
    inputs_ = x;
    Batch<Scalar> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] = conv_transpose2d_forward<Scalar>(x[i], weight_matrix(), bias_.value, geometry_);
    }
    return y;
  }

  Batch<Scalar> backward(const Batch<Scalar>& dy) {
    auto dw = weight_grad_matrix();
    Batch<Scalar> dx(dy.size());
    for (std::size_t i = 0; i < dy.size(); ++i) {
      const RowMatrix<Scalar> dcols = im2col(dy[i], geometry_);
      dw.noalias() += inputs_[i].data * dcols.transpose();
      bias_.grad += dy[i].data.rowwise().sum();
      dx[i].height = inputs_[i].height;
      dx[i].width = inputs_[i].width;
      dx[i].data.noalias() = weight_matrix() * dcols;
    }
    return dx;
  }

  std::vector<Parameter<Scalar>*> parameters() { return {&weight_, &bias_}; }
  std::vector<const Parameter<Scalar>*> parameters() const { return {&weight_, &bias_}; }

  Index in_channels() const { return in_channels_; }
  Index out_channels() const { return out_channels_; }

 private:
  Eigen::Map<const RowMatrix<Scalar>> weight_matrix() const {
    return {weight_.value.data(), in_channels_, out_channels_ * kernel_ * kernel_};
  }
  Eigen::Map<RowMatrix<Scalar>> weight_grad_matrix() {
    return {weight_.grad.data(), in_channels_, out_channels_ * kernel_ * kernel_};
  }

  Index in_channels_ = 0;
  Index out_channels_ = 0;
  Index kernel_ = 4;
  Index stride_ = 2;
  Index padding_ = 1;
  Parameter<Scalar> weight_;
  Parameter<Scalar> bias_;
  ConvGeometry geometry_;
  Batch<Scalar> inputs_;
};

template <typename Scalar>
class InstanceNorm {
 public:
  static constexpr double kEpsilon = 1e-5;

  Batch<Scalar> forward(const Batch<Scalar>& x) {
    caches_.resize(x.size());
    Batch<Scalar> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] = instance_norm_forward(x[i], Scalar(kEpsilon), &caches_[i]);
    }
    return y;
  }

  Batch<Scalar> backward(const Batch<Scalar>& dy) const {
    Batch<Scalar> dx(dy.size());
    for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = instance_norm_backward(dy[i], caches_[i]);
    return dx;
  }

 private:
  std::vector<InstanceNormCache<Scalar>> caches_;
};

}  // namespace fedsynth::nn
