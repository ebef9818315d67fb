#include "fedsynth/data/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "fedsynth/errors.hpp"

namespace fedsynth {

// libpng's simplified API reports failures through return codes, so no
// exception ever crosses the C library.

GrayPng read_gray_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    throw ValidationError(path.string() + ": " + image.message);
  }
  if ((image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA)) != 0) {
    png_image_free(&image);
    throw ValidationError(path.string() + ": expected a grayscale PNG without alpha");
  }
  const bool sixteen = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  image.format = sixteen ? PNG_FORMAT_LINEAR_Y : PNG_FORMAT_GRAY;

  GrayPng out;
  out.bit_depth = sixteen ? 16 : 8;
  out.pixels.resize(image.height, image.width);
  if (sixteen) {
    std::vector<png_uint_16> buffer(static_cast<std::size_t>(image.width) * image.height);
    if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
      throw ValidationError(path.string() + ": " + image.message);
    }
    for (png_uint_32 r = 0; r < image.height; ++r) {
      for (png_uint_32 c = 0; c < image.width; ++c) {
        out.pixels(r, c) = buffer[r * image.width + c];
      }
    }
  } else {
    std::vector<png_byte> buffer(static_cast<std::size_t>(image.width) * image.height);
    if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
      throw ValidationError(path.string() + ": " + image.message);
    }
    for (png_uint_32 r = 0; r < image.height; ++r) {
      for (png_uint_32 c = 0; c < image.width; ++c) {
        out.pixels(r, c) = buffer[r * image.width + c];
      }
    }
  }
  return out;
}

void write_gray_png(const std::filesystem::path& path, const RawImage& pixels, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ValidationError("PNG bit depth must be 8 or 16");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(pixels.cols());
  image.height = static_cast<png_uint_32>(pixels.rows());
  int ok = 0;
  if (bit_depth == 16) {
    image.format = PNG_FORMAT_LINEAR_Y;
    std::vector<png_uint_16> buffer(static_cast<std::size_t>(pixels.size()));
    for (Eigen::Index r = 0; r < pixels.rows(); ++r) {
      for (Eigen::Index c = 0; c < pixels.cols(); ++c) buffer[r * pixels.cols() + c] = pixels(r, c);
    }
    ok = png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr);
  } else {
    image.format = PNG_FORMAT_GRAY;
    std::vector<png_byte> buffer(static_cast<std::size_t>(pixels.size()));
    for (Eigen::Index r = 0; r < pixels.rows(); ++r) {
      for (Eigen::Index c = 0; c < pixels.cols(); ++c) {
        buffer[r * pixels.cols() + c] = static_cast<png_byte>(std::min<int>(pixels(r, c), 255));
      }
    }
    ok = png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr);
  }
  if (ok == 0) throw std::runtime_error("cannot write " + path.string() + ": " + image.message);
}

RawImage quantize(const Eigen::MatrixXf& image, int bit_depth) {
  const float top = bit_depth == 16 ? 65535.0f : 255.0f;
  return image.unaryExpr([top](float v) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * top));
  });
}

}  // namespace fedsynth
