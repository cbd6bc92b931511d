#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace salrc {

constexpr int kMinQp = 0;
constexpr int kMaxQp = 51;

/// R-lambda rate model: lambda = a * bpp^b (b < 0), QP = round(c1*ln(lambda) + c2).
/// Defaults are the HM reference values.
struct RateModel {
  double a = 3.2003;
  double b = -1.367;
  double c1 = 4.2005;
  double c2 = 13.7122;
};

inline double lambda_of_bpp(const RateModel& m, double bpp) {
  if (!(bpp > 0.0)) {
    throw std::invalid_argument("lambda_of_bpp: bpp must be positive");
  }
  return m.a * std::pow(bpp, m.b);
}

inline int qp_of_lambda(const RateModel& m, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("qp_of_lambda: lambda must be positive");
  }
  long qp = std::lround(m.c1 * std::log(lambda) + m.c2);
  return static_cast<int>(std::clamp(qp, static_cast<long>(kMinQp), static_cast<long>(kMaxQp)));
}

/// Inverts qp -> lambda -> bpp using the unrounded lambda implied by the
/// integer QP.
inline double bpp_of_qp(const RateModel& m, int qp) {
  const double lambda = std::exp((qp - m.c2) / m.c1);
  return std::pow(lambda / m.a, 1.0 / m.b);
}

inline int qp_of_bpp(const RateModel& m, double bpp) {
  return qp_of_lambda(m, lambda_of_bpp(m, bpp));
}

/// Slice/picture QP from the picture's average target bpp.
inline int picture_qp(const RateModel& m, std::int64_t target_bits, std::int64_t total_pixels) {
  if (target_bits <= 0) throw std::invalid_argument("picture_qp: target bits must be positive");
  if (total_pixels <= 0) throw std::invalid_argument("picture_qp: pixel count must be positive");
  return qp_of_bpp(m, static_cast<double>(target_bits) / total_pixels);
}

}  // namespace salrc
