#pragma once

#include <Eigen/Core>

namespace fedsynth {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  void validate() const;
};

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
Eigen::VectorXd gaussian_taps(const SsimParams& params);

/// Per-pixel SSIM over every fully contained window position ("valid"
/// filtering), size (rows - w + 1) x (cols - w + 1).
Eigen::MatrixXd ssim_map(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const SsimParams& params = {});

/// Mean of ssim_map. Throws ShapeError on mismatched dimensions or images
/// smaller than the window.
double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SsimParams& params = {});

template <typename DerivedA, typename DerivedB>
double ssim(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
            const SsimParams& params = {}) {
  return ssim(Eigen::MatrixXd(a.template cast<double>()), Eigen::MatrixXd(b.template cast<double>()),
              params);
}

}  // namespace fedsynth
