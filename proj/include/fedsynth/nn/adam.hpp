#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "fedsynth/nn/layers.hpp"

namespace fedsynth::nn {

/// Adaptive-moment optimizer with bias correction. Moment buffers are owned
/// here, aligned index-by-index with the parameter list passed to step().
template <typename Scalar>
class Adam {
 public:
  Adam() = default;
  Adam(double beta1, double beta2, double epsilon = 1e-8)
      : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  void step(const std::vector<Parameter<Scalar>*>& params, double lr) {
    if (first_moment_.empty()) {
      for (const auto* p : params) {
        first_moment_.push_back(Vector<Scalar>::Zero(p->value.size()));
        second_moment_.push_back(Vector<Scalar>::Zero(p->value.size()));
      }
    }
    if (first_moment_.size() != params.size()) throw ShapeError("Adam: parameter list changed");
    ++steps_;
    const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
    const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
    const Scalar b1 = static_cast<Scalar>(beta1_);
    const Scalar b2 = static_cast<Scalar>(beta2_);
    const Scalar step_size = static_cast<Scalar>(lr / correction1);
    const Scalar inv_sqrt_c2 = static_cast<Scalar>(1.0 / std::sqrt(correction2));
    const Scalar eps = static_cast<Scalar>(epsilon_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto& g = params[i]->grad;
      auto& m = first_moment_[i];
      auto& v = second_moment_[i];
      m = b1 * m + (Scalar(1) - b1) * g;
      v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
      params[i]->value.array() -=
          step_size * m.array() / (v.array().sqrt() * inv_sqrt_c2 + eps);
    }
  }

  std::int64_t steps() const { return steps_; }
  const std::vector<Vector<Scalar>>& first_moments() const { return first_moment_; }
  const std::vector<Vector<Scalar>>& second_moments() const { return second_moment_; }

  /// Restores optimizer state, e.g. from a checkpoint.
  void restore(std::int64_t steps, std::vector<Vector<Scalar>> first,
               std::vector<Vector<Scalar>> second) {
    if (first.size() != second.size()) throw ShapeError("Adam::restore: moment count mismatch");
    steps_ = steps;
    first_moment_ = std::move(first);
    second_moment_ = std::move(second);
  }

 private:
  double beta1_ = 0.5;
  double beta2_ = 0.999;
  double epsilon_ = 1e-8;
  std::int64_t steps_ = 0;
  std::vector<Vector<Scalar>> first_moment_;
  std::vector<Vector<Scalar>> second_moment_;
};

}  // namespace fedsynth::nn
