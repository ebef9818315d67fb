#include "fedsynth/metrics/ssim.hpp"

#include <cmath>
#include <string>

#include "fedsynth/errors.hpp"

namespace fedsynth {

void SsimParams::validate() const {
  if (window < 1 || window % 2 == 0) throw ValidationError("SSIM window must be odd and >= 1");
  if (!(sigma > 0.0)) throw ValidationError("SSIM sigma must be > 0");
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw ValidationError("SSIM k1, k2 must be > 0");
  if (!(dynamic_range > 0.0)) throw ValidationError("SSIM dynamic range must be > 0");
}

Eigen::VectorXd gaussian_taps(const SsimParams& params) {
  Eigen::VectorXd taps(params.window);
  const double center = (params.window - 1) / 2.0;
  for (int i = 0; i < params.window; ++i) {
    const double d = i - center;
    taps[i] = std::exp(-d * d / (2.0 * params.sigma * params.sigma));
  }
  return taps / taps.sum();
}

namespace {

// Separable valid-mode filtering with the Gaussian window.
Eigen::MatrixXd filter_valid(const Eigen::MatrixXd& x, const Eigen::VectorXd& taps) {
  const Eigen::Index w = taps.size();
  const Eigen::Index rows = x.rows() - w + 1;
  const Eigen::Index cols = x.cols() - w + 1;
  Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(rows, x.cols());
  for (Eigen::Index k = 0; k < w; ++k) tmp += taps[k] * x.middleRows(k, rows);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index k = 0; k < w; ++k) out += taps[k] * tmp.middleCols(k, cols);
  return out;
}

}  // namespace

Eigen::MatrixXd ssim_map(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const SsimParams& params) {
  params.validate();
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("ssim: image dimensions differ (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
  if (a.rows() < params.window || a.cols() < params.window) {
    throw ShapeError("ssim: image smaller than the " + std::to_string(params.window) +
                     "-pixel window");
  }
  const Eigen::VectorXd taps = gaussian_taps(params);
  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);

  const Eigen::ArrayXXd mu_a = filter_valid(a, taps).array();
  const Eigen::ArrayXXd mu_b = filter_valid(b, taps).array();
  const Eigen::ArrayXXd var_a = filter_valid(a.cwiseProduct(a), taps).array() - mu_a.square();
  const Eigen::ArrayXXd var_b = filter_valid(b.cwiseProduct(b), taps).array() - mu_b.square();
  const Eigen::ArrayXXd cov = filter_valid(a.cwiseProduct(b), taps).array() - mu_a * mu_b;

  return (((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
          ((mu_a.square() + mu_b.square() + c1) * (var_a + var_b + c2)))
      .matrix();
}

double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SsimParams& params) {
  return ssim_map(a, b, params).mean();
}

}  // namespace fedsynth
