#pragma once

#include <cstdint>
#include <vector>

#include "salrc/importance.hpp"
#include "salrc/rate_model.hpp"

namespace salrc {

/// QP band half-widths around the slice QP. Preliminary QPs are bounded to
/// qp_s +- pre; actual QPs to qp_s +- act, shifted to [qp_s, qp_s + 2*act]
/// when the block's preliminary QP reached qp_s + pre.
struct QpBands {
  int pre = 3;
  int act = 2;
};

/// cu_size-aligned block grid over a width x height picture. Edge blocks may
/// be partial; n_pixels reports their true size.
struct BlockPartition {
  int width = 0;
  int height = 0;
  int cu_size = 0;
  int blocks_x = 0;
  int blocks_y = 0;

  static BlockPartition make(int width, int height, int cu_size) {
    if (width < 1 || height < 1) throw std::invalid_argument("block partition: empty picture");
    if (cu_size < 1) throw std::invalid_argument("block partition: cu_size < 1");
    BlockPartition p;
    p.width = width;
    p.height = height;
    p.cu_size = cu_size;
    p.blocks_x = (width + cu_size - 1) / cu_size;
    p.blocks_y = (height + cu_size - 1) / cu_size;
    return p;
  }

  int count() const { return blocks_x * blocks_y; }
  int col(int idx) const { return idx % blocks_x; }
  int row(int idx) const { return idx / blocks_x; }
  int x0(int idx) const { return col(idx) * cu_size; }
  int y0(int idx) const { return row(idx) * cu_size; }
  int block_width(int idx) const { return std::min(cu_size, width - x0(idx)); }
  int block_height(int idx) const { return std::min(cu_size, height - y0(idx)); }
  std::int64_t n_pixels(int idx) const {
    return static_cast<std::int64_t>(block_width(idx)) * block_height(idx);
  }
  std::int64_t total_pixels() const { return static_cast<std::int64_t>(width) * height; }
};

/// Uniform-importance grid for a partition: every pixel equally important, so
/// block importance is its pixel-count share. Reproduces plain rate control.
inline BlockImportanceGrid uniform_importance_grid(const BlockPartition& p) {
  BlockImportanceGrid grid;
  grid.blocks_x = p.blocks_x;
  grid.blocks_y = p.blocks_y;
  grid.cu_size = p.cu_size;
  grid.importance.resize(p.count());
  const double total = static_cast<double>(p.total_pixels());
  for (int i = 0; i < p.count(); ++i) grid.importance[i] = p.n_pixels(i) / total;
  return grid;
}

inline double coarse_bpp(double importance, std::int64_t target_bits, std::int64_t n_pixels) {
  return importance * static_cast<double>(target_bits) / static_cast<double>(n_pixels);
}

struct PreliminaryQp {
  int qp_p = 0;
  double bpp_p = 0.0;
};

/// Block-level preliminary QP: the R-lambda QP of the coarse bpp bounded to
/// qp_s +- pre_band, then bpp_p from the bounded QP. Zero-importance blocks
/// take the band's upper edge and are incremented by 1 afterwards, without
/// re-bounding and without recomputing bpp_p.
inline PreliminaryQp preliminary_qp(const RateModel& m, double bpp_coarse, int qp_s,
                                    double importance, int pre_band = 3) {
  const int lo = qp_s - pre_band;
  const int hi = qp_s + pre_band;
  PreliminaryQp out;
  if (bpp_coarse > 0.0) {
    out.qp_p = std::clamp(qp_of_bpp(m, bpp_coarse), lo, hi);
  } else {
    out.qp_p = hi;
  }
  out.bpp_p = bpp_of_qp(m, out.qp_p);
  if (importance == 0.0) out.qp_p += 1;
  return out;
}

/// I_F(i,j) = bpp_p(i,j) / sum bpp_p; uniform fallback when all bpp_p are zero.
inline std::vector<double> final_importance(const std::vector<double>& bpp_p) {
  if (bpp_p.empty()) throw std::invalid_argument("final_importance: no blocks");
  double sum = 0.0;
  for (double v : bpp_p) sum += v;
  std::vector<double> out(bpp_p.size());
  if (sum > 0.0) {
    for (std::size_t i = 0; i < bpp_p.size(); ++i) out[i] = bpp_p[i] / sum;
  } else {
    std::fill(out.begin(), out.end(), 1.0 / bpp_p.size());
  }
  return out;
}

/// w = I_F / sum I_F. Identity under exact arithmetic; kept as written.
inline std::vector<double> block_weights(const std::vector<double>& i_f) {
  if (i_f.empty()) throw std::invalid_argument("block_weights: no blocks");
  double sum = 0.0;
  for (double v : i_f) sum += v;
  std::vector<double> out(i_f.size());
  if (sum > 0.0) {
    for (std::size_t i = 0; i < i_f.size(); ++i) out[i] = i_f[i] / sum;
  } else {
    std::fill(out.begin(), out.end(), 1.0 / i_f.size());
  }
  return out;
}

/// Per-block allocation inputs, fixed before coding starts.
struct BlockPlan {
  double importance = 0.0;
  std::int64_t n_pixels = 0;
  double bpp_coarse = 0.0;
  int qp_p = 0;
  double bpp_p = 0.0;
  double i_f = 0.0;
  double weight = 0.0;
};

struct PicturePlan {
  int qp_s = 0;
  std::int64_t t_bits = 0;
  std::vector<BlockPlan> blocks;
};

inline PicturePlan plan_picture(const RateModel& m, const QpBands& bands,
                                const BlockPartition& part, const BlockImportanceGrid& grid,
                                std::int64_t t_bits) {
  if (grid.blocks_x != part.blocks_x || grid.blocks_y != part.blocks_y) {
    throw std::invalid_argument("plan_picture: importance grid does not match partition");
  }
  PicturePlan plan;
  plan.t_bits = t_bits;
  plan.qp_s = picture_qp(m, t_bits, part.total_pixels());
  plan.blocks.resize(part.count());

  std::vector<double> bpp_p(part.count());
  for (int i = 0; i < part.count(); ++i) {
    BlockPlan& blk = plan.blocks[i];
    blk.importance = grid.importance[i];
    blk.n_pixels = part.n_pixels(i);
    blk.bpp_coarse = coarse_bpp(blk.importance, t_bits, blk.n_pixels);
    const PreliminaryQp pre = preliminary_qp(m, blk.bpp_coarse, plan.qp_s, blk.importance, bands.pre);
    blk.qp_p = pre.qp_p;
    blk.bpp_p = pre.bpp_p;
    bpp_p[i] = pre.bpp_p;
  }
  const std::vector<double> i_f = final_importance(bpp_p);
  const std::vector<double> w = block_weights(i_f);
  for (int i = 0; i < part.count(); ++i) {
    plan.blocks[i].i_f = i_f[i];
    plan.blocks[i].weight = w[i];
  }
  return plan;
}

/// Estimated bits for coding block `cursor` and all subsequent blocks in
/// raster order: sum of bpp_p * n_pixels from the cursor on.
inline double remaining_bits_estimate(const std::vector<BlockPlan>& blocks, int cursor) {
  if (cursor < 0 || cursor >= static_cast<int>(blocks.size())) {
    throw std::invalid_argument("remaining_bits_estimate: cursor out of range");
  }
  double sum = 0.0;
  for (std::size_t i = cursor; i < blocks.size(); ++i) {
    sum += blocks[i].bpp_p * static_cast<double>(blocks[i].n_pixels);
  }
  return sum;
}

/// Sequential budget-feedback state for one picture.
struct RateControlState {
  std::int64_t t_bits = 0;
  std::int64_t l_bits = 0;  // remaining budget
  int l_blk = 0;            // remaining blocks, current included
  int sw = 4;               // sliding window
  int qp_s = 0;
  int cursor = 0;
};

/// T_bits_blk = { L_bits + L_blk * (L_bits - L_est) / SW } * w, floored at 0.
inline double target_bits_block(const RateControlState& st, double weight, double l_bits_est) {
  if (st.l_blk < 1) throw std::invalid_argument("target_bits_block: no blocks remaining");
  const double l_bits = static_cast<double>(st.l_bits);
  const double t = (l_bits + st.l_blk * (l_bits - l_bits_est) / st.sw) * weight;
  return std::max(0.0, t);
}

/// Final block QP from its target bits. Bounded to qp_s +- act_band, shifted
/// to [qp_s, qp_s + 2*act_band] when qp_p >= qp_s + pre-band edge (pre-band
/// edge passed via shift_threshold). Non-positive targets take the active
/// band's upper bound. Result clipped to [0,51].
inline int actual_qp(const RateModel& m, double t_bits_blk, std::int64_t n_pixels, int qp_s,
                     int qp_p, const QpBands& bands) {
  int lo = qp_s - bands.act;
  int hi = qp_s + bands.act;
  if (qp_p >= qp_s + bands.pre) {
    lo = qp_s;
    hi = qp_s + 2 * bands.act;
  }
  int qp;
  if (t_bits_blk > 0.0) {
    qp = std::clamp(qp_of_bpp(m, t_bits_blk / static_cast<double>(n_pixels)), lo, hi);
  } else {
    qp = hi;
  }
  return std::clamp(qp, kMinQp, kMaxQp);
}

/// Charges the coded bits to the budget and advances the cursor.
inline void commit_block(RateControlState& st, std::int64_t bits_actual) {
  if (st.l_blk < 1) throw std::runtime_error("commit_block: all blocks already committed");
  st.l_bits -= bits_actual;
  st.l_blk -= 1;
  st.cursor += 1;
}

/// Full per-block record, as exported in the encode CSV.
struct BlockRecord {
  int x = 0;  // top-left pixel coordinates
  int y = 0;
  std::int64_t n_pixels = 0;
  double importance = 0.0;
  double bpp_coarse = 0.0;
  int qp_p = 0;
  double bpp_p = 0.0;
  double i_f = 0.0;
  double weight = 0.0;
  double t_bits_blk = 0.0;
  int qp_a = 0;
  std::int64_t bits_actual = 0;
};

/// Drives one picture's sequential allocation loop:
///   while (!done()) { qp = begin_block(); <code block>; commit(bits); }
class RateControlSession {
 public:
  RateControlSession(const RateModel& model, const QpBands& bands, const BlockPartition& part,
                     const BlockImportanceGrid& grid, std::int64_t t_bits, int sw = 4)
      : model_(model), bands_(bands), plan_(plan_picture(model, bands, part, grid, t_bits)) {
    if (sw < 1) throw std::invalid_argument("rate control: sliding window must be >= 1");
    state_.t_bits = t_bits;
    state_.l_bits = t_bits;
    state_.l_blk = part.count();
    state_.sw = sw;
    state_.qp_s = plan_.qp_s;
    state_.cursor = 0;
    records_.resize(part.count());
    for (int i = 0; i < part.count(); ++i) {
      BlockRecord& r = records_[i];
      const BlockPlan& b = plan_.blocks[i];
      r.x = part.x0(i);
      r.y = part.y0(i);
      r.n_pixels = b.n_pixels;
      r.importance = b.importance;
      r.bpp_coarse = b.bpp_coarse;
      r.qp_p = b.qp_p;
      r.bpp_p = b.bpp_p;
      r.i_f = b.i_f;
      r.weight = b.weight;
    }
  }

  int qp_s() const { return state_.qp_s; }
  bool done() const { return state_.l_blk == 0; }
  int cursor() const { return state_.cursor; }
  const PicturePlan& plan() const { return plan_; }
  const RateControlState& state() const { return state_; }
  const std::vector<BlockRecord>& records() const { return records_; }

  int begin_block() {
    if (done()) throw std::runtime_error("rate control: no blocks remaining");
    if (in_block_) throw std::runtime_error("rate control: previous block not committed");
    const int i = state_.cursor;
    const BlockPlan& blk = plan_.blocks[i];
    const double l_est = remaining_bits_estimate(plan_.blocks, i);
    const double t_blk = target_bits_block(state_, blk.weight, l_est);
    const int qp = actual_qp(model_, t_blk, blk.n_pixels, state_.qp_s, blk.qp_p, bands_);
    records_[i].t_bits_blk = t_blk;
    records_[i].qp_a = qp;
    in_block_ = true;
    return qp;
  }

  void commit(std::int64_t bits_actual) {
    if (!in_block_) throw std::runtime_error("rate control: commit without begin_block");
    records_[state_.cursor].bits_actual = bits_actual;
    commit_block(state_, bits_actual);
    in_block_ = false;
  }

 private:
  RateModel model_;
  QpBands bands_;
  PicturePlan plan_;
  RateControlState state_;
  std::vector<BlockRecord> records_;
  bool in_block_ = false;
};

}  // namespace salrc
