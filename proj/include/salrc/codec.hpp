#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "salrc/bitio.hpp"
#include "salrc/dct.hpp"
#include "salrc/image.hpp"
#include "salrc/rate_control.hpp"

namespace salrc {

/// Quantizer step for a QP, HEVC convention.
inline double qp_step(int qp) {
  if (qp < kMinQp || qp > kMaxQp) throw std::invalid_argument("QP outside [0,51]");
  return std::pow(2.0, (qp - 4) / 6.0);
}

/// Uniform quantizer, round half away from zero. No deadzone.
inline std::vector<std::int32_t> quantize(const std::vector<double>& coeffs, int qp) {
  const double q = qp_step(qp);
  std::vector<std::int32_t> levels(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    levels[i] = static_cast<std::int32_t>(std::lround(coeffs[i] / q));
  }
  return levels;
}

inline std::vector<double> dequantize(const std::vector<std::int32_t>& levels, int qp) {
  const double q = qp_step(qp);
  std::vector<double> coeffs(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) coeffs[i] = levels[i] * q;
  return coeffs;
}

/// Diagonal zig-zag scan order for an n x n block.
inline std::vector<int> zigzag_order(int n) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n) * n);
  for (int s = 0; s <= 2 * (n - 1); ++s) {
    if (s % 2 == 0) {  // up-right
      for (int y = std::min(s, n - 1); y >= std::max(0, s - n + 1); --y) {
        order.push_back(y * n + (s - y));
      }
    } else {  // down-left
      for (int x = std::min(s, n - 1); x >= std::max(0, s - n + 1); --x) {
        order.push_back((s - x) * n + x);
      }
    }
  }
  return order;
}

/// Coded block payload: ue(nonzero count), then per nonzero coefficient in
/// zig-zag order ue(preceding zero run) and se(level).
inline void encode_levels(BitWriter& bw, const std::vector<std::int32_t>& zz_levels) {
  int nnz = 0;
  for (std::int32_t v : zz_levels) {
    if (v != 0) ++nnz;
  }
  bw.put_ue(static_cast<std::uint64_t>(nnz));
  int run = 0;
  for (std::int32_t v : zz_levels) {
    if (v == 0) {
      ++run;
      continue;
    }
    bw.put_ue(static_cast<std::uint64_t>(run));
    bw.put_se(v);
    run = 0;
  }
}

inline std::vector<std::int32_t> decode_levels(BitReader& br, int count) {
  std::vector<std::int32_t> zz(count, 0);
  const std::uint64_t nnz = br.get_ue();
  if (nnz > static_cast<std::uint64_t>(count)) throw std::runtime_error("malformed payload: nnz");
  int pos = 0;
  for (std::uint64_t i = 0; i < nnz; ++i) {
    pos += static_cast<int>(br.get_ue());
    if (pos >= count) throw std::runtime_error("malformed payload: run overflow");
    const std::int64_t level = br.get_se();
    if (level == 0) throw std::runtime_error("malformed payload: zero level");
    zz[pos] = static_cast<std::int32_t>(level);
    ++pos;
  }
  return zz;
}

namespace detail {

inline Image pad_replicate(const Image& img, int cu) {
  const int pw = ((img.width + cu - 1) / cu) * cu;
  const int ph = ((img.height + cu - 1) / cu) * cu;
  Image out = make_image(pw, ph);
  for (int y = 0; y < ph; ++y) {
    const int sy = std::min(y, img.height - 1);
    for (int x = 0; x < pw; ++x) {
      out.at(x, y) = img.at(std::min(x, img.width - 1), sy);
    }
  }
  return out;
}

// Shared by encoder and decoder so reconstructions match bit-exactly.
inline void reconstruct_block(const std::vector<std::int32_t>& levels_raster, int qp, int cu,
                              Image& recon, int x0, int y0) {
  const std::vector<double> coeffs = dequantize(levels_raster, qp);
  const std::vector<double> samples = idct2(coeffs, cu);
  for (int y = 0; y < cu; ++y) {
    for (int x = 0; x < cu; ++x) {
      const long v = std::lround(samples[static_cast<std::size_t>(y) * cu + x] + 128.0);
      recon.at(x0 + x, y0 + y) = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
    }
  }
}

inline void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

inline std::uint32_t get_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

constexpr char kBitstreamMagic[4] = {'S', 'A', 'L', '1'};
constexpr int kQpFieldBits = 6;

/// Bitstream byte layout:
///   0    magic "SAL1"
///   4    u32le width, u32le height
///   12   u8 cu_size, u8 qp field width (6)
///   14   B x u32le per-block payload bit lengths (raster order)
///   ..   B QP fields, qp-field-width bits each, byte padded
///   ..   block payloads, bit packed back to back, byte padded at the end
/// Block count B derives from the dimensions and cu_size. Header and QP map
/// are not charged to the rate-control budget; bits_actual per block is the
/// exact payload bit length stored in the header.
struct CodedImage {
  std::vector<std::uint8_t> bytes;
  Image recon;
  std::vector<BlockRecord> blocks;
  std::int64_t payload_bits = 0;
  int qp_s = 0;  // slice QP in rate-controlled mode, the fixed QP otherwise
};

namespace detail {

template <typename QpForBlock, typename OnBits>
CodedImage encode_blocks(const Image& img, int cu, QpForBlock&& qp_for_block, OnBits&& on_bits) {
  if (cu != 8 && cu != 16) throw std::invalid_argument("cu_size must be 8 or 16");
  const BlockPartition part = BlockPartition::make(img.width, img.height, cu);
  const Image padded = pad_replicate(img, cu);
  Image recon_padded = make_image(padded.width, padded.height);

  CodedImage out;
  out.blocks.resize(part.count());

  BitWriter payload;
  std::vector<std::uint32_t> block_bits(part.count());
  std::vector<int> qps(part.count());
  const std::vector<int> zz = zigzag_order(cu);

  std::vector<double> block(static_cast<std::size_t>(cu) * cu);
  for (int i = 0; i < part.count(); ++i) {
    const int qp = qp_for_block(i);
    qps[i] = qp;
    const int bx = part.col(i) * cu;
    const int by = part.row(i) * cu;
    for (int y = 0; y < cu; ++y) {
      for (int x = 0; x < cu; ++x) {
        block[static_cast<std::size_t>(y) * cu + x] = padded.at(bx + x, by + y) - 128.0;
      }
    }
    const std::vector<double> coeffs = dct2(block, cu);
    const std::vector<std::int32_t> levels = quantize(coeffs, qp);
    std::vector<std::int32_t> zz_levels(levels.size());
    for (std::size_t k = 0; k < zz.size(); ++k) zz_levels[k] = levels[zz[k]];

    const std::int64_t before = payload.bit_count();
    encode_levels(payload, zz_levels);
    const std::int64_t bits = payload.bit_count() - before;
    block_bits[i] = static_cast<std::uint32_t>(bits);

    detail::reconstruct_block(levels, qp, cu, recon_padded, bx, by);

    BlockRecord& rec = out.blocks[i];
    rec.x = bx;
    rec.y = by;
    rec.n_pixels = part.n_pixels(i);
    rec.qp_a = qp;
    rec.bits_actual = bits;
    on_bits(i, bits);
  }

  // assemble
  out.bytes.assign(kBitstreamMagic, kBitstreamMagic + 4);
  detail::put_u32le(out.bytes, static_cast<std::uint32_t>(img.width));
  detail::put_u32le(out.bytes, static_cast<std::uint32_t>(img.height));
  out.bytes.push_back(static_cast<std::uint8_t>(cu));
  out.bytes.push_back(static_cast<std::uint8_t>(kQpFieldBits));
  for (std::uint32_t b : block_bits) detail::put_u32le(out.bytes, b);
  BitWriter qp_fields;
  for (int qp : qps) qp_fields.put_bits(static_cast<std::uint64_t>(qp), kQpFieldBits);
  out.bytes.insert(out.bytes.end(), qp_fields.bytes().begin(), qp_fields.bytes().end());
  out.bytes.insert(out.bytes.end(), payload.bytes().begin(), payload.bytes().end());

  out.payload_bits = payload.bit_count();
  out.recon = make_image(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) out.recon.at(x, y) = recon_padded.at(x, y);
  }
  return out;
}

}  // namespace detail

/// Encodes with one QP for every block.
inline CodedImage encode_fixed_qp(const Image& img, int cu, int qp) {
  if (qp < kMinQp || qp > kMaxQp) throw std::invalid_argument("QP outside [0,51]");
  CodedImage out = detail::encode_blocks(
      img, cu, [qp](int) { return qp; }, [](int, std::int64_t) {});
  out.qp_s = qp;
  return out;
}

/// Encodes under the importance-guided rate-control loop; per-block QPs come
/// from the session, coded bits feed back into the budget.
inline CodedImage encode_rate_controlled(const Image& img, int cu, std::int64_t t_bits,
                                         const BlockImportanceGrid& grid, const RateModel& model,
                                         const QpBands& bands, int sw = 4) {
  const BlockPartition part = BlockPartition::make(img.width, img.height, cu);
  RateControlSession session(model, bands, part, grid, t_bits, sw);
  CodedImage out = detail::encode_blocks(
      img, cu, [&session](int) { return session.begin_block(); },
      [&session](int, std::int64_t bits) { session.commit(bits); });
  out.qp_s = session.qp_s();
  out.blocks = session.records();
  return out;
}

struct DecodedImage {
  Image image;
  std::vector<int> qps;
};

/// Decodes a bitstream produced by the encoder; the reconstruction matches the
/// encoder side bit-exactly.
inline DecodedImage decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 14 || !std::equal(kBitstreamMagic, kBitstreamMagic + 4, bytes.begin())) {
    throw std::runtime_error("not a SAL1 bitstream");
  }
  const int width = static_cast<int>(detail::get_u32le(&bytes[4]));
  const int height = static_cast<int>(detail::get_u32le(&bytes[8]));
  const int cu = bytes[12];
  const int qp_bits = bytes[13];
  if (width < 1 || height < 1 || (cu != 8 && cu != 16) || qp_bits != kQpFieldBits) {
    throw std::runtime_error("malformed bitstream header");
  }
  const BlockPartition part = BlockPartition::make(width, height, cu);
  const int count = part.count();

  std::size_t pos = 14;
  if (bytes.size() < pos + static_cast<std::size_t>(count) * 4) {
    throw std::runtime_error("truncated bitstream header");
  }
  std::vector<std::uint32_t> block_bits(count);
  std::int64_t total_bits = 0;
  for (int i = 0; i < count; ++i) {
    block_bits[i] = detail::get_u32le(&bytes[pos]);
    pos += 4;
    total_bits += block_bits[i];
  }

  const std::size_t qp_bytes = (static_cast<std::size_t>(count) * qp_bits + 7) / 8;
  if (bytes.size() < pos + qp_bytes) throw std::runtime_error("truncated QP map");
  BitReader qp_reader(&bytes[pos], static_cast<std::int64_t>(qp_bytes) * 8);
  std::vector<int> qps(count);
  for (int i = 0; i < count; ++i) {
    qps[i] = static_cast<int>(qp_reader.get_bits(qp_bits));
    if (qps[i] > kMaxQp) throw std::runtime_error("malformed QP map");
  }
  pos += qp_bytes;

  const std::size_t payload_bytes = (static_cast<std::size_t>(total_bits) + 7) / 8;
  if (bytes.size() < pos + payload_bytes) throw std::runtime_error("truncated payload");
  BitReader payload(&bytes[pos], total_bits);

  Image recon_padded = make_image(part.blocks_x * cu, part.blocks_y * cu);
  const std::vector<int> zz = zigzag_order(cu);
  std::vector<std::int32_t> levels(static_cast<std::size_t>(cu) * cu);
  for (int i = 0; i < count; ++i) {
    const std::int64_t before = payload.bits_consumed();
    const std::vector<std::int32_t> zz_levels = decode_levels(payload, cu * cu);
    if (payload.bits_consumed() - before != static_cast<std::int64_t>(block_bits[i])) {
      throw std::runtime_error("malformed payload: block length mismatch");
    }
    for (std::size_t k = 0; k < zz.size(); ++k) levels[zz[k]] = zz_levels[k];
    detail::reconstruct_block(levels, qps[i], cu, recon_padded, part.col(i) * cu,
                              part.row(i) * cu);
  }

  DecodedImage out;
  out.qps = std::move(qps);
  out.image = make_image(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.image.at(x, y) = recon_padded.at(x, y);
  }
  return out;
}

inline void save_bitstream(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write bitstream: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing bitstream: " + path);
}

inline std::vector<std::uint8_t> load_bitstream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open bitstream: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace salrc
