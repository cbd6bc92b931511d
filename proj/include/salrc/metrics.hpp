#pragma once

#include <cmath>
#include <limits>

#include "salrc/image.hpp"
#include "salrc/importance.hpp"

namespace salrc {

inline double mse(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("mse: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - b.samples[i];
    acc += d * d;
  }
  return acc / a.samples.size();
}

/// 10*log10(255^2 / MSE); +infinity for identical images.
inline double psnr(const Image& a, const Image& b) {
  const double e = mse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / e);
}

/// Bilinear sample of the map at image resolution, half-pixel centers.
inline std::vector<double> upsample_bilinear(const ImportanceMap& map, int width, int height) {
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  const double rx = static_cast<double>(map.width) / width;
  const double ry = static_cast<double>(map.height) / height;
  for (int y = 0; y < height; ++y) {
    const double sy = (y + 0.5) * ry - 0.5;
    int y0 = static_cast<int>(std::floor(sy));
    const double fy = sy - y0;
    const int ya = std::clamp(y0, 0, map.height - 1);
    const int yb = std::clamp(y0 + 1, 0, map.height - 1);
    for (int x = 0; x < width; ++x) {
      const double sx = (x + 0.5) * rx - 0.5;
      int x0 = static_cast<int>(std::floor(sx));
      const double fx = sx - x0;
      const int xa = std::clamp(x0, 0, map.width - 1);
      const int xb = std::clamp(x0 + 1, 0, map.width - 1);
      out[static_cast<std::size_t>(y) * width + x] =
          (1 - fy) * ((1 - fx) * map.at(xa, ya) + fx * map.at(xb, ya)) +
          fy * ((1 - fx) * map.at(xa, yb) + fx * map.at(xb, yb));
    }
  }
  return out;
}

/// PSNR over importance-weighted MSE. The map is upsampled to image size and
/// renormalized to mean 1, so a uniform map reproduces plain PSNR. An all-zero
/// map carries no weighting information and also falls back to plain PSNR.
inline double weighted_psnr(const Image& a, const Image& b, const ImportanceMap& map) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("weighted_psnr: dimension mismatch");
  }
  const std::vector<double> w = upsample_bilinear(map, a.width, a.height);
  double wsum = 0.0;
  for (double v : w) wsum += v;
  if (wsum <= 0.0) return psnr(a, b);

  const double scale = static_cast<double>(w.size()) / wsum;  // mean-1 weights
  double acc = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - b.samples[i];
    acc += scale * w[i] * d * d;
  }
  const double e = acc / a.samples.size();
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / e);
}

}  // namespace salrc
