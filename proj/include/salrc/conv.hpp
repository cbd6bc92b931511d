#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "salrc/filter_bank.hpp"
#include "salrc/image.hpp"
#include "salrc/resample.hpp"

namespace salrc {

/// Stack of per-filter response maps for one layer. Channel maps are
/// row-major width x height; values are unbounded (pre-clamp).
struct FeatureTensor {
  int layer = 0;
  int width = 0;
  int height = 0;
  std::vector<std::vector<double>> channels;

  int channel_count() const { return static_cast<int>(channels.size()); }
  double at(int c, int x, int y) const {
    return channels[c][static_cast<std::size_t>(y) * width + x];
  }
};

/// Single-channel tensor from 8-bit luma, normalized to [0,1].
inline FeatureTensor image_to_tensor(const Image& img) {
  FeatureTensor t;
  t.layer = 0;
  t.width = img.width;
  t.height = img.height;
  t.channels.emplace_back(img.samples.size());
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    t.channels[0][i] = img.samples[i] / 255.0;
  }
  return t;
}

/// Cross-correlation with zero padding of width 1: same-size output, one
/// channel per filter, summed over input channels. No activation.
inline FeatureTensor cross_correlate(const FeatureTensor& in, const std::vector<Filter>& filters) {
  if (in.channel_count() == 0 || in.width < 1 || in.height < 1) {
    throw std::invalid_argument("cross_correlate: empty input");
  }
  for (const Filter& f : filters) {
    if (static_cast<int>(f.taps.size()) != in.channel_count()) {
      throw std::invalid_argument("cross_correlate: filter/input channel count mismatch");
    }
  }

  const int w = in.width;
  const int h = in.height;
  FeatureTensor out;
  out.layer = in.layer;
  out.width = w;
  out.height = h;
  out.channels.assign(filters.size(), std::vector<double>(static_cast<std::size_t>(w) * h, 0.0));

  for (std::size_t n = 0; n < filters.size(); ++n) {
    std::vector<double>& dst = out.channels[n];
    for (int c = 0; c < in.channel_count(); ++c) {
      const std::vector<double>& src = in.channels[c];
      const std::array<double, 9>& k = filters[n].taps[c].k;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          for (int dy = -1; dy <= 1; ++dy) {
            int sy = y + dy;
            if (sy < 0 || sy >= h) continue;
            for (int dx = -1; dx <= 1; ++dx) {
              int sx = x + dx;
              if (sx < 0 || sx >= w) continue;
              acc += k[(dy + 1) * 3 + (dx + 1)] * src[static_cast<std::size_t>(sy) * w + sx];
            }
          }
          dst[static_cast<std::size_t>(y) * w + x] += acc;
        }
      }
    }
  }
  return out;
}

/// f(t) = t for t >= 0, slope*t otherwise.
inline void leaky_activate(FeatureTensor& t, double slope) {
  for (std::vector<double>& ch : t.channels) {
    for (double& v : ch) {
      if (v < 0) v *= slope;
    }
  }
}

inline FeatureTensor conv_layer(const FeatureTensor& in, const LayerSpec& layer) {
  FeatureTensor out = cross_correlate(in, layer.filters);
  leaky_activate(out, layer.slope);
  return out;
}

/// 2x2 stride-2 max pool; odd trailing row/column dropped.
inline FeatureTensor max_pool(const FeatureTensor& in) {
  if (in.width < 2 || in.height < 2) {
    throw std::invalid_argument("max_pool: input smaller than one 2x2 window");
  }
  const int ow = in.width / 2;
  const int oh = in.height / 2;
  FeatureTensor out;
  out.layer = in.layer;
  out.width = ow;
  out.height = oh;
  out.channels.assign(in.channels.size(), std::vector<double>(static_cast<std::size_t>(ow) * oh));
  for (std::size_t c = 0; c < in.channels.size(); ++c) {
    const std::vector<double>& src = in.channels[c];
    std::vector<double>& dst = out.channels[c];
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const std::size_t base = static_cast<std::size_t>(2 * y) * in.width + 2 * x;
        double m = src[base];
        m = std::max(m, src[base + 1]);
        m = std::max(m, src[base + in.width]);
        m = std::max(m, src[base + in.width + 1]);
        dst[static_cast<std::size_t>(y) * ow + x] = m;
      }
    }
  }
  return out;
}

struct StackResult {
  FeatureTensor tensor;
  ScaleInfo scale;
};

/// Rescales to input_size on the long side, then runs conv layers 1..stop_layer.
/// Returns layer stop_layer's activated output; pools of the layers before it
/// are applied, the stop layer's own pool is not (the map is extracted first).
inline StackResult run_stack(const Image& img, const FilterBank& bank, int stop_layer,
                             int input_size = 416) {
  validate_bank(bank);
  if (stop_layer < 1 || stop_layer > bank.depth()) {
    throw std::invalid_argument("stop_layer outside bank depth");
  }

  auto [scaled, si] = rescale_keep_aspect(img, input_size);
  FeatureTensor t = image_to_tensor(scaled);
  double layer_dim = input_size;

  for (int l = 1; l <= stop_layer; ++l) {
    const LayerSpec& spec = bank.layers[l - 1];
    t = conv_layer(t, spec);
    t.layer = l;
    if (l == stop_layer) break;
    if (spec.pool) {
      t = max_pool(t);
      layer_dim /= 2;
    }
  }

  ScaleInfo out = si;
  out.layer = stop_layer;
  out.layer_dim = layer_dim;
  out.scale = layer_dim / std::max(img.width, img.height);
  out.width_l = t.width;
  out.height_l = t.height;
  return {std::move(t), out};
}

}  // namespace salrc
