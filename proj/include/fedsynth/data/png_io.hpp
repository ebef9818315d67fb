#pragma once

#include <cstdint>
#include <filesystem>

#include <Eigen/Core>

namespace fedsynth {

using RawImage = Eigen::Matrix<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic>;

struct GrayPng {
  RawImage pixels;
  int bit_depth = 8;  // 8 or 16
};

/// Reads an 8- or 16-bit grayscale PNG (sub-byte depths are expanded to 8).
/// Colour or alpha images are rejected.
GrayPng read_gray_png(const std::filesystem::path& path);

/// Writes a grayscale PNG at 8 or 16 bits per pixel.
void write_gray_png(const std::filesystem::path& path, const RawImage& pixels, int bit_depth);

/// Quantizes [0, 1] intensities (clamped) to the full range of `bit_depth`.
RawImage quantize(const Eigen::MatrixXf& image, int bit_depth);

}  // namespace fedsynth
