#pragma once

#include <cmath>
#include <utility>

#include "salrc/image.hpp"

namespace salrc {

/// Geometry of one feature layer relative to the source image.
/// scale = layer_dim / max{source width, source height}; layer dims are the
/// actual map dims, which track round(src * scale) up to pool truncation.
struct ScaleInfo {
  int layer = 1;
  double layer_dim = 416.0;  // C_l; halves after every pool
  double scale = 1.0;        // S_l
  int width_l = 0;
  int height_l = 0;
  int src_width = 0;
  int src_height = 0;
};

/// Resizes so the longer side becomes target_long; aspect preserved, bilinear
/// with half-pixel centers, no padding.
inline std::pair<Image, ScaleInfo> rescale_keep_aspect(const Image& img, int target_long) {
  if (target_long < 16) throw std::invalid_argument("target size must be >= 16");

  const int long_side = std::max(img.width, img.height);
  const double scale = static_cast<double>(target_long) / long_side;
  const int out_w = std::max(1, static_cast<int>(std::lround(img.width * scale)));
  const int out_h = std::max(1, static_cast<int>(std::lround(img.height * scale)));

  Image out = make_image(out_w, out_h);
  const double rx = static_cast<double>(img.width) / out_w;
  const double ry = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    double sy = (y + 0.5) * ry - 0.5;
    int y0 = static_cast<int>(std::floor(sy));
    double fy = sy - y0;
    int ya = std::clamp(y0, 0, img.height - 1);
    int yb = std::clamp(y0 + 1, 0, img.height - 1);
    for (int x = 0; x < out_w; ++x) {
      double sx = (x + 0.5) * rx - 0.5;
      int x0 = static_cast<int>(std::floor(sx));
      double fx = sx - x0;
      int xa = std::clamp(x0, 0, img.width - 1);
      int xb = std::clamp(x0 + 1, 0, img.width - 1);
      double v = (1 - fy) * ((1 - fx) * img.at(xa, ya) + fx * img.at(xb, ya)) +
                 fy * ((1 - fx) * img.at(xa, yb) + fx * img.at(xb, yb));
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }

  ScaleInfo si;
  si.layer = 1;
  si.layer_dim = target_long;
  si.scale = scale;
  si.width_l = out_w;
  si.height_l = out_h;
  si.src_width = img.width;
  si.src_height = img.height;
  return {std::move(out), si};
}

}  // namespace salrc
