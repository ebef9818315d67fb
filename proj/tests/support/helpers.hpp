#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "fedsynth/data/phantom.hpp"
#include "fedsynth/nn/tensor.hpp"

namespace testing {

using fedsynth::Batch;
using fedsynth::FeatureMap;
using fedsynth::Index;

template <typename Scalar>
Batch<Scalar> random_batch(std::size_t n, Index c, Index h, Index w, std::mt19937_64& rng,
                           double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Batch<Scalar> out(n);
  for (auto& m : out) {
    m.height = h;
    m.width = w;
    m.data.resize(c, h * w);
    for (Index i = 0; i < m.data.size(); ++i) m.data.data()[i] = static_cast<Scalar>(dist(rng));
  }
  return out;
}

/// Central differences of `loss` with respect to values[0..n).
inline Eigen::VectorXd numeric_gradient(double* values, Index n, const std::function<double()>& loss,
                                        double h = 1e-6) {
  Eigen::VectorXd g(n);
  for (Index i = 0; i < n; ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double up = loss();
    values[i] = saved - h;
    const double down = loss();
    values[i] = saved;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

inline double relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
  const double scale = analytic.norm() + numeric.norm();
  return scale == 0.0 ? 0.0 : (analytic - numeric).norm() / scale;
}

inline Eigen::VectorXd flatten(const Batch<double>& b) {
  Index total = 0;
  for (const auto& m : b) total += m.data.size();
  Eigen::VectorXd out(total);
  Index k = 0;
  for (const auto& m : b) {
    for (Index i = 0; i < m.data.size(); ++i) out[k++] = m.data.data()[i];
  }
  return out;
}

/// Weighted sum sum(w .* y): a scalar probe whose output gradient is w.
inline double probe(const Batch<double>& y, const Batch<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i].data.array() * w[i].data.array()).sum();
  return s;
}

inline fedsynth::SiteProfile quiet_profile(const std::string& id = "A") {
  fedsynth::SiteProfile p;
  p.site_id = id;
  return p;
}

}  // namespace testing
