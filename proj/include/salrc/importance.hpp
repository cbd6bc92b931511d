#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "salrc/conv.hpp"

namespace salrc {

/// Per-filter informativeness weights, one per channel, in [0,1].
struct FilterWeights {
  std::vector<double> alpha;
};

/// Normalized per-pixel object importance at layer resolution. values holds
/// the min-max normalized map in [0,1]; raw keeps the pre-normalization
/// weighted l2 fusion for diagnostics. A constant fusion result cannot be
/// normalized; the map is then emitted as a constant (degenerate flag set) so
/// block importance degrades to plain uniform allocation.
struct ImportanceMap {
  int layer = 0;
  int width = 0;
  int height = 0;
  std::vector<double> values;
  std::vector<double> raw;
  bool degenerate = false;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Per-block importance, normalized so the grid sums to 1. Blocks are indexed
/// by column/row; (i,j) top-left pixel coordinates are i = col*cu, j = row*cu.
struct BlockImportanceGrid {
  int blocks_x = 0;
  int blocks_y = 0;
  int cu_size = 0;
  std::vector<double> importance;  // row-major over [blocks_y][blocks_x]

  int count() const { return blocks_x * blocks_y; }
  double at(int col, int row) const {
    return importance[static_cast<std::size_t>(row) * blocks_x + col];
  }
};

/// psi_hat = max{0, min{1, psi}} per element.
inline FeatureTensor clamp_unit(FeatureTensor t) {
  for (std::vector<double>& ch : t.channels) {
    for (double& v : ch) v = std::max(0.0, std::min(1.0, v));
  }
  return t;
}

/// alpha = 1 - mean of the clamped channel.
inline double filter_weight(const std::vector<double>& clamped_channel) {
  if (clamped_channel.empty()) throw std::invalid_argument("filter_weight: empty map");
  double sum = std::accumulate(clamped_channel.begin(), clamped_channel.end(), 0.0);
  return 1.0 - sum / clamped_channel.size();
}

inline FilterWeights filter_weights(const FeatureTensor& clamped) {
  FilterWeights w;
  w.alpha.reserve(clamped.channels.size());
  for (const std::vector<double>& ch : clamped.channels) {
    w.alpha.push_back(filter_weight(ch));
  }
  return w;
}

/// Weighted l2 fusion across channels followed by min-max normalization:
/// O(x,y) = sqrt(sum_n (alpha_n * psi_hat_n(x,y))^2), then O mapped linearly
/// onto [0,1].
inline ImportanceMap fuse(const FeatureTensor& clamped, const FilterWeights& weights) {
  if (weights.alpha.size() != clamped.channels.size()) {
    throw std::invalid_argument("fuse: weight count != channel count");
  }
  if (clamped.channel_count() == 0) throw std::invalid_argument("fuse: empty tensor");

  ImportanceMap map;
  map.layer = clamped.layer;
  map.width = clamped.width;
  map.height = clamped.height;
  const std::size_t n = static_cast<std::size_t>(map.width) * map.height;
  map.raw.assign(n, 0.0);
  for (std::size_t c = 0; c < clamped.channels.size(); ++c) {
    const double a = weights.alpha[c];
    const std::vector<double>& ch = clamped.channels[c];
    for (std::size_t i = 0; i < n; ++i) {
      const double v = a * ch[i];
      map.raw[i] += v * v;
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double& v : map.raw) {
    v = std::sqrt(v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  map.values.resize(n);
  if (hi > lo) {
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < n; ++i) map.values[i] = (map.raw[i] - lo) * inv;
  } else {
    std::fill(map.values.begin(), map.values.end(), 0.5);
    map.degenerate = true;
  }
  return map;
}

namespace detail {

// Splits axis [0, map_dim) into strips of block_side map units (the last strip
// absorbs any remainder), then assigns each unit-width map cell its fractional
// overlap per strip. Exact partition: weights for one cell sum to 1.
struct AxisSplit {
  std::vector<std::vector<std::pair<int, double>>> cell_weights;
};

inline AxisSplit split_axis(int map_dim, int blocks, double block_side) {
  AxisSplit split;
  split.cell_weights.resize(map_dim);
  for (int x = 0; x < map_dim; ++x) {
    const double a = x;
    const double b = x + 1.0;
    int k = std::min(blocks - 1, static_cast<int>(a / block_side));
    while (k < blocks) {
      const double lo = (k == 0) ? 0.0 : k * block_side;
      const double hi = (k == blocks - 1) ? map_dim : std::min<double>((k + 1) * block_side, map_dim);
      const double overlap = std::min(b, hi) - std::max(a, lo);
      if (overlap > 0) split.cell_weights[x].push_back({k, overlap});
      if (hi >= b || k == blocks - 1) break;
      ++k;
    }
  }
  return split;
}

}  // namespace detail

/// Converts the pixel-wise map into per-block importance for a cu_size block
/// grid over the source image. Block footprints on the map are the image
/// blocks scaled by the layer scale (side cu_size * S_l); map cells straddling
/// block edges are split by exact area overlap, so the grid sums to 1. An
/// all-zero map falls back to uniform 1/(block count).
inline BlockImportanceGrid block_importance(const ImportanceMap& map, int cu_size,
                                            const ScaleInfo& scale) {
  if (cu_size < 1) throw std::invalid_argument("block_importance: cu_size < 1");
  if (map.width != scale.width_l || map.height != scale.height_l) {
    throw std::invalid_argument("block_importance: map dims disagree with scale info");
  }

  BlockImportanceGrid grid;
  grid.cu_size = cu_size;
  grid.blocks_x = (scale.src_width + cu_size - 1) / cu_size;
  grid.blocks_y = (scale.src_height + cu_size - 1) / cu_size;
  grid.importance.assign(static_cast<std::size_t>(grid.blocks_x) * grid.blocks_y, 0.0);

  // Per-axis effective scale; equals S_l up to the rounding of map dims.
  const double side_x = cu_size * (static_cast<double>(map.width) / scale.src_width);
  const double side_y = cu_size * (static_cast<double>(map.height) / scale.src_height);
  const detail::AxisSplit sx = detail::split_axis(map.width, grid.blocks_x, side_x);
  const detail::AxisSplit sy = detail::split_axis(map.height, grid.blocks_y, side_y);

  double total = 0.0;
  for (int y = 0; y < map.height; ++y) {
    for (const auto& [row, wy] : sy.cell_weights[y]) {
      for (int x = 0; x < map.width; ++x) {
        const double v = map.values[static_cast<std::size_t>(y) * map.width + x];
        if (v == 0.0) continue;
        for (const auto& [col, wx] : sx.cell_weights[x]) {
          grid.importance[static_cast<std::size_t>(row) * grid.blocks_x + col] += v * wx * wy;
        }
      }
    }
  }
  for (double v : grid.importance) total += v;

  if (total > 0.0) {
    for (double& v : grid.importance) v /= total;
  } else {
    std::fill(grid.importance.begin(), grid.importance.end(), 1.0 / grid.count());
  }
  return grid;
}

}  // namespace salrc
