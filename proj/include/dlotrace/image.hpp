#pragma once

#include "dlotrace/core.hpp"

#include <cstdint>
#include <filesystem>

namespace dlo {

/// 8-bit grayscale image. Row-major; element (y, x). Pixel centers sit at
/// integer coordinates, so the point (x, y) samples pixel (row y, col x).
using ImageU8 = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Float image used as render/augment scratch, same layout.
using ImageF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline int image_width(const ImageU8& img) { return static_cast<int>(img.cols()); }
inline int image_height(const ImageU8& img) { return static_cast<int>(img.rows()); }

inline bool in_bounds(const ImageU8& img, const Vec2& p) {
  return p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= img.cols() - 1.0 && p.y() <= img.rows() - 1.0;
}

/// Bilinear sample; coordinates outside the image return `fill`.
double sample_bilinear(const ImageU8& img, const Vec2& p, double fill = 0.0);

std::uint8_t clamp_u8(double v);

// Binary PGM (P5). Round-trips byte-exactly.
void write_pgm(const ImageU8& img, const std::filesystem::path& path);
ImageU8 read_pgm(const std::filesystem::path& path);

// 8-bit grayscale PNG; reading converts other color types to gray.
void write_png(const ImageU8& img, const std::filesystem::path& path);
ImageU8 read_png(const std::filesystem::path& path);

/// Dispatches on extension (.pgm / .png).
ImageU8 read_image(const std::filesystem::path& path);
void write_image(const ImageU8& img, const std::filesystem::path& path);

}  // namespace dlo
