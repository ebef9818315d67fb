#pragma once

#include <cmath>

#include "fedsynth/errors.hpp"
#include "fedsynth/nn/tensor.hpp"

namespace fedsynth {

template <typename Scalar>
struct LossWithGrad {
  double value = 0.0;
  Batch<Scalar> grad;  // d value / d input
};

/// Mean binary cross-entropy of sigmoid(logits) against a constant label,
/// evaluated as max(x,0) - x*z + log1p(exp(-|x|)).
template <typename Scalar>
LossWithGrad<Scalar> bce_with_logits(const Batch<Scalar>& logits, double label) {
  require_uniform(logits, "bce_with_logits");
  const double count = static_cast<double>(logits.size() * logits.front().data.size());
  LossWithGrad<Scalar> out;
  out.grad = logits;
  double total = 0.0;
  for (std::size_t s = 0; s < logits.size(); ++s) {
    const auto& x = logits[s].data;
    auto& g = out.grad[s].data;
    for (Index i = 0; i < x.size(); ++i) {
      const double v = static_cast<double>(x.data()[i]);
      total += std::max(v, 0.0) - v * label + std::log1p(std::exp(-std::abs(v)));
      const double sig = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
      g.data()[i] = static_cast<Scalar>((sig - label) / count);
    }
  }
  out.value = total / count;
  return out;
}

/// meanAbs(prediction - reference); the gradient uses sign(0) = 0.
template <typename Scalar>
LossWithGrad<Scalar> l1_loss(const Batch<Scalar>& prediction, const Batch<Scalar>& reference) {
  require_same_shape(prediction, reference, "l1_loss");
  const double count = static_cast<double>(prediction.size() * prediction.front().data.size());
  LossWithGrad<Scalar> out;
  out.grad = prediction;
  double total = 0.0;
  for (std::size_t s = 0; s < prediction.size(); ++s) {
    const auto diff = (prediction[s].data - reference[s].data).eval();
    total += diff.array().abs().template cast<double>().sum();
    out.grad[s].data = diff.array().sign() * static_cast<Scalar>(1.0 / count);
  }
  out.value = total / count;
  return out;
}

struct Pix2PixLosses {
  double g_loss = 0.0;
  double d_loss = 0.0;
  double l1 = 0.0;
};

/// g = BCE(fake_logits, 1) + lambda * l1;  d = (BCE(real_logits, 1) + BCE(fake_logits, 0)) / 2.
template <typename Scalar>
Pix2PixLosses pix2pix_losses(const Batch<Scalar>& real_logits, const Batch<Scalar>& fake_logits,
                             const Batch<Scalar>& fake, const Batch<Scalar>& real,
                             double lambda) {
  if (!(lambda >= 0.0)) throw ValidationError("l1 weight must be >= 0");
  require_same_shape(real_logits, fake_logits, "pix2pix_losses logits");
  require_same_shape(fake, real, "pix2pix_losses images");
  if (!all_finite(real_logits) || !all_finite(fake_logits) || !all_finite(fake) ||
      !all_finite(real)) {
    throw NumericalError("pix2pix_losses: non-finite input");
  }
  Pix2PixLosses out;
  const double adversarial = bce_with_logits(fake_logits, 1.0).value;
  out.l1 = l1_loss(fake, real).value;
  out.g_loss = lambda == 0.0 ? adversarial : adversarial + lambda * out.l1;
  out.d_loss =
      0.5 * (bce_with_logits(real_logits, 1.0).value + bce_with_logits(fake_logits, 0.0).value);
  return out;
}

}  // namespace fedsynth
