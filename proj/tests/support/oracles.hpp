#pragma once

// Reference implementations written independently of the library code.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace testing {

/// SSIM by direct evaluation of every 11x11 window with an explicit 2-D
/// Gaussian (sigma 1.5), C1 = 0.01^2, C2 = 0.03^2, unit dynamic range.
inline double naive_ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const int w = 11;
  const double sigma = 1.5;
  Eigen::MatrixXd window(w, w);
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < w; ++j) {
      window(i, j) = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * sigma * sigma));
    }
  }
  window /= window.sum();
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  double total = 0.0;
  int count = 0;
  for (Eigen::Index y = 0; y + w <= a.rows(); ++y) {
    for (Eigen::Index x = 0; x + w <= a.cols(); ++x) {
      const auto pa = a.block(y, x, w, w);
      const auto pb = b.block(y, x, w, w);
      const double ma = (window.array() * pa.array()).sum();
      const double mb = (window.array() * pb.array()).sum();
      const double va = (window.array() * (pa.array() - ma).square()).sum();
      const double vb = (window.array() * (pb.array() - mb).square()).sum();
      const double cov = (window.array() * (pa.array() - ma) * (pb.array() - mb)).sum();
      total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / count;
}

/// Two-sided signed-rank p from all 2^n sign assignments of the mid-ranked
/// non-zero magnitudes: 2 * P(W+ <= min(W+, W-)), capped at 1.
inline double brute_force_signed_rank_p(const std::vector<double>& diffs) {
  std::vector<double> d;
  for (double v : diffs) {
    if (v != 0.0) d.push_back(v);
  }
  const std::size_t n = d.size();
  if (n == 0) return 1.0;
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0;
    double equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) ++below;
      if (std::abs(d[j]) == std::abs(d[i])) ++equal;
    }
    ranks[i] = below + (equal + 1) / 2;
  }
  double plus = 0;
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += ranks[i];
    if (d[i] > 0) plus += ranks[i];
  }
  const double w = std::min(plus, total - plus);
  std::uint64_t extreme = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) s += ranks[i];
    }
    if (s <= w) ++extreme;
  }
  return std::min(1.0, 2.0 * static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n)));
}

}  // namespace testing
