#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace salrc {

/// MSB-first bit writer.
class BitWriter {
 public:
  void put_bit(int bit) {
    if (bit_pos_ == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - bit_pos_));
    bit_pos_ = (bit_pos_ + 1) & 7;
    ++bit_count_;
  }

  void put_bits(std::uint64_t value, int n) {
    for (int i = n - 1; i >= 0; --i) put_bit(static_cast<int>((value >> i) & 1u));
  }

  /// Unsigned exp-Golomb: k encoded as floor(log2(k+1)) zeros then k+1 in
  /// binary; length 2*floor(log2(k+1)) + 1 bits.
  void put_ue(std::uint64_t k) {
    const std::uint64_t v = k + 1;
    int width = 0;
    while ((v >> width) > 1) ++width;
    for (int i = 0; i < width; ++i) put_bit(0);
    put_bits(v, width + 1);
  }

  /// Signed exp-Golomb: v>0 -> 2v-1, v<=0 -> -2v.
  void put_se(std::int64_t v) {
    const std::uint64_t k =
        v > 0 ? 2 * static_cast<std::uint64_t>(v) - 1 : 2 * static_cast<std::uint64_t>(-v);
    put_ue(k);
  }

  std::int64_t bit_count() const { return bit_count_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  int bit_pos_ = 0;
  std::int64_t bit_count_ = 0;
};

/// MSB-first bit reader over an externally owned buffer.
class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::int64_t bit_length)
      : data_(data), bit_length_(bit_length) {}

  int get_bit() {
    if (pos_ >= bit_length_) throw std::runtime_error("bitstream overrun");
    const int bit = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return bit;
  }

  std::uint64_t get_bits(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
    return v;
  }

  std::uint64_t get_ue() {
    int zeros = 0;
    while (get_bit() == 0) {
      if (++zeros > 63) throw std::runtime_error("malformed exp-Golomb code");
    }
    std::uint64_t v = 1;
    for (int i = 0; i < zeros; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
    return v - 1;
  }

  std::int64_t get_se() {
    const std::uint64_t k = get_ue();
    if (k & 1) return static_cast<std::int64_t>((k + 1) / 2);
    return -static_cast<std::int64_t>(k / 2);
  }

  std::int64_t bits_consumed() const { return pos_; }

 private:
  const std::uint8_t* data_;
  std::int64_t bit_length_;
  std::int64_t pos_ = 0;
};

}  // namespace salrc
